"""Tests relating to affinetrees.utils."""
import pytest
import affinetrees.utils
from affinetrees.exceptions import LetterRangeError


def test_merge_config_empty():
    """Given an empty configuration, returns the default configuration."""
    assert affinetrees.utils.merge_config() == affinetrees.utils.default_config


def test_merge_config_merge():
    """Given a valid configuration, returns a merged configuration."""
    merged = affinetrees.utils.merge_config({"scan_degree": 2})
    assert merged != affinetrees.utils.default_config
    assert merged["scan_degree"] == 2
    assert merged["state_budget"] == affinetrees.utils.default_config["state_budget"]


def test_load_config_default():
    """Given no path, returns the default configuration."""
    assert affinetrees.utils.load_config() == affinetrees.utils.default_config


def test_load_config_file(tmp_path):
    """Given a YAML file, its keys override the defaults."""
    path = tmp_path / "config.yaml"
    path.write_text("order_bound: 8\nvrep_depth: 4\n", encoding="utf-8")
    config = affinetrees.utils.load_config(str(path))
    assert config["order_bound"] == 8
    assert config["vrep_depth"] == 4


def test_load_config_not_mapping(tmp_path):
    """Given a YAML list, loading fails."""
    path = tmp_path / "config.yaml"
    path.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ValueError):
        affinetrees.utils.load_config(str(path))


def test_load_config_missing(tmp_path):
    """Given a missing file, loading fails."""
    with pytest.raises(OSError):
        affinetrees.utils.load_config(str(tmp_path / "missing.yaml"))


def test_parse_word():
    """Given a digit string, returns the tuple of letters and back."""
    assert affinetrees.utils.parse_word("0120", 3) == (0, 1, 2, 0)
    assert affinetrees.utils.format_word((1, 0, 1)) == "101"
    assert affinetrees.utils.parse_word("", 2) == ()


def test_parse_word_out_of_range():
    """Given a letter outside the alphabet, parsing fails."""
    with pytest.raises(LetterRangeError):
        affinetrees.utils.parse_word("012", 2)
    with pytest.raises(LetterRangeError):
        affinetrees.utils.parse_word("0a", 2)
