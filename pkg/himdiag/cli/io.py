# himdiag/cli/io.py
"""CSV ingestion and report serialization for the command line"""
import io
import json
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd

from himdiag.influence.schemas import DataMatrix
from himdiag.utils.errors import ConfigError, ParseError
from himdiag.utils.helpers import atomic_write_text

_FIELD_COUNT = re.compile(r"line (\d+)")


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _load_cells(path: Path) -> pd.DataFrame:
    try:
        return pd.read_csv(path, header=None, dtype=str, keep_default_na=False, skip_blank_lines=True)
    except pd.errors.EmptyDataError as exc:
        raise ParseError(1, message="File is empty") from exc
    except pd.errors.ParserError as exc:
        match = _FIELD_COUNT.search(str(exc))
        raise ParseError(int(match.group(1)) if match else 0, message=f"Ragged row: {exc}") from exc


def _data_lines(path: Path, rows: int) -> List[int]:
    """One-based file line of each parsed row; blank lines are skipped by the parser"""
    lines = [i for i, text in enumerate(path.read_text().split("\n"), start=1) if text.strip()]
    # quoted fields spanning lines break the one-row-per-line mapping
    return lines if len(lines) == rows else list(range(1, rows + 1))


def _response_position(header: Optional[list], response_column: Union[str, int], width: int) -> int:
    if header is not None and str(response_column) in header:
        return header.index(str(response_column))
    text = str(response_column).strip()
    if text.lstrip("-").isdigit():
        position = int(text)
        if 0 <= position < width:
            return position
        raise ConfigError(f"Response column index {position} outside [0, {width})")
    raise ConfigError(f"Response column {response_column!r} not found")


def read_csv(path: Union[str, Path], response_column: Union[str, int]) -> DataMatrix:
    """Numeric table to DataMatrix; a non-numeric first line is taken as the header.

    Line numbers in ParseError are one-based file lines, columns zero-based.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Input file not found: {path}")
    cells = _load_cells(path)

    first = cells.iloc[0].tolist()
    has_header = not all(isinstance(c, str) and _is_number(c) for c in first)
    header = [str(c).strip() for c in first] if has_header else None
    body = cells.iloc[1:] if has_header else cells
    lines = _data_lines(path, len(cells))
    if has_header:
        lines = lines[1:]

    values = np.empty(body.shape, dtype=np.float64)
    for i, row in enumerate(body.itertuples(index=False)):
        for j, cell in enumerate(row):
            if not isinstance(cell, str) or cell.strip() == "":
                raise ParseError(lines[i], j, "Missing cell")
            try:
                value = float(cell)
            except ValueError as exc:
                raise ParseError(lines[i], j, f"Non-numeric cell {cell!r}") from exc
            if not np.isfinite(value):
                raise ParseError(lines[i], j, f"Non-finite cell {cell!r}")
            values[i, j] = value

    position = _response_position(header, response_column, values.shape[1])
    predictors = [j for j in range(values.shape[1]) if j != position]
    names = [header[j] for j in predictors] if header is not None else [f"x{j}" for j in predictors]
    return DataMatrix(x=values[:, predictors], y=values[:, position], column_names=names)


def dump_json(payload: Dict[str, Any], output_path: Optional[str]) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    emit(text, output_path)


def dump_frame(frame: pd.DataFrame, output_path: Optional[str]) -> None:
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, lineterminator="\n")
    emit(buffer.getvalue(), output_path)


def emit(text: str, output_path: Optional[str]) -> None:
    """Write once, atomically, or print when no path is given"""
    if output_path:
        atomic_write_text(output_path, text)
    else:
        print(text, end="")
