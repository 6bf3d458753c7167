"""This sub-module contains low-level utilities used to make things simple.

Contents:
    - `merge_config()` - Merges provided configuration dictionary with default configuration.
    - `load_config()` - Reads a YAML configuration file and merges it.
    - `parse_word()` / `format_word()` - Convert words to and from digit strings.
"""
import logging

import yaml

from affinetrees.exceptions import LetterRangeError

logger = logging.getLogger(__name__)


default_config = {
    "state_budget": 1_000_000,
    "order_bound": 64,
    "portrait_depth": 8,
    "normalizer_depth": 8,
    "scan_degree": 6,
    "scan_direct_degree": 2,
    "max_conj_power": 16,
    "relation_depth": 4,
    "relation_samples": 4,
    "render_size": 32,
    "vrep_depth": 8,
    "vrep_support": 4,
    "vrep_state_budget": 200_000,
    "faithfulness_depth": 10,
    "faithfulness_support": 3,
    "faithfulness_shift": 3,
}
"""Default configuration used across the package, mainly bounds and budgets
for the exact (but potentially expensive) automaton constructions.
"""


def merge_config(config: dict = None):
    """Merges provided configuration dictionary with default configuration.

    Args:
        config (dict): Dictionary containing configuration for affinetrees.

    Returns:
        (dict): A dictionary containing the configuration, merged with the default values.

    Example:
        ```python
        >>> import affinetrees.utils
        >>> affinetrees.utils.merge_config({"scan_degree": 2})["scan_degree"]
        2

        ```
    """
    if not config:
        config = {}
    return {**default_config, **config}


def load_config(path: str = None):
    """Reads a YAML configuration file and merges it over the defaults.

    Unknown keys are kept but logged, so a typo does not silently do nothing.

    Args:
        path (str, optional): Path to a YAML mapping. `None` gives the defaults.

    Returns:
        dict: The merged configuration.

    Raises:
        OSError: The file cannot be read.
        ValueError: The file does not contain a mapping.
    """
    if path is None:
        return merge_config()
    with open(path, encoding="utf-8") as handle:
        data = yaml.safe_load(handle) or {}
    if not isinstance(data, dict):
        raise ValueError(f"Configuration file '{path}' must contain a mapping")
    for key in data:
        if key not in default_config:
            logger.warning("Unknown configuration key '%s' in '%s'", key, path)
    logger.debug("Loaded configuration from '%s'", path)
    return merge_config(data)


def parse_word(text: str, degree: int):
    """Converts a digit string such as `"0110"` into a tuple of letters.

    Raises:
        LetterRangeError: A character is not a digit below `degree`.
    """
    word = []
    for char in text.strip():
        if not char.isdigit() or int(char) >= degree:
            raise LetterRangeError(f"'{char}' is not a letter of a {degree}-letter alphabet")
        word.append(int(char))
    return tuple(word)


def format_word(word):
    """Converts a tuple of letters into a digit string."""
    return "".join(str(letter) for letter in word)
