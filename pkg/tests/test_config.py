import pytest

from partalg.config import DEFAULT, Config, load_config, parse_config_text, thread_cap


def test_defaults():
    assert DEFAULT.output_format == "text" and DEFAULT.smith_dim_limit > 0


def test_parse():
    cfg = parse_config_text("# caps\npotts_capacity = 64\noutput_format=json  # inline\n\n")
    assert cfg.potts_capacity == 64 and cfg.output_format == "json"
    assert cfg.enumeration_cap == DEFAULT.enumeration_cap


@pytest.mark.parametrize("text", ["bogus = 1", "potts_capacity", "potts_capacity = 0",
                                  "output_format = xml", "smith_dim_limit = x"])
def test_parse_errors(text):
    with pytest.raises(ValueError):
        parse_config_text(text)


def test_load(tmp_path):
    f = tmp_path / "c.cfg"
    f.write_text("smith_dim_limit = 3\n")
    assert load_config(str(f)).smith_dim_limit == 3
    assert load_config(None) is DEFAULT


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("PARTALG_THREADS", "3")
    assert thread_cap() == 3
    monkeypatch.setenv("PARTALG_THREADS", "zero")
    assert thread_cap() is None
    monkeypatch.delenv("PARTALG_THREADS")
    assert thread_cap() is None


def test_config_validation():
    with pytest.raises(ValueError):
        Config(enumeration_cap=-1)
