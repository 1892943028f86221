import logging
import pathlib
from typing import Any

import numpy as np


class ResultSerialiser:
    def __init__(self):
        self.logger = logging.getLogger(self.__class__.__name__)

    def load(self, input_file: pathlib.Path) -> Any:
        raise NotImplementedError("")

    def save(self, output_file: pathlib.Path, content: Any) -> None:
        raise NotImplementedError("")


def format_number(value) -> str:
    """Integers as digits, booleans as words, floats with 17 significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"
