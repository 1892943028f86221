import dataclasses
import json
import pathlib
from typing import Any

import numpy as np

from . import ResultSerialiser


class EnhancedJSONEncoder(json.JSONEncoder):
    """Dataclasses as objects, sets and arrays as lists, complex numbers as [re, im] pairs."""

    def default(self, o):
        if dataclasses.is_dataclass(o):
            return dataclasses.asdict(o)

        if isinstance(o, set):
            return sorted(o)

        if isinstance(o, np.ndarray):
            if np.iscomplexobj(o):
                return np.stack([o.real, o.imag], axis=-1).tolist()
            return o.tolist()

        if isinstance(o, (complex, np.complexfloating)):
            return [float(o.real), float(o.imag)]

        if isinstance(o, np.generic):
            return o.item()

        return super().default(o)


class JSONSerialiser(ResultSerialiser):
    def load(self, input_file: pathlib.Path) -> Any:
        with open(input_file) as f_in:
            return json.load(f_in)

    def save(self, output_file: pathlib.Path, content: Any) -> None:
        with open(output_file, "w", newline="\n") as f_out:
            json.dump(content, f_out, indent=2, cls=EnhancedJSONEncoder)
            f_out.write("\n")
