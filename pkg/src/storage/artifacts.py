import csv
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Sequence

import numpy as np

from src.models.grid import Field, SpatialGrid
from src.models.reports import BubbleDecomposition
from src.utils.errors import InvalidDataError
from src.utils.logger import get_logger

logger = get_logger(__name__)

PROVENANCE_MARK = "# provenance"
FIELD_MARK = "# field"


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


class ArtifactStore:
    """Writes CSV artifacts under one output directory.

    Every file starts with the provenance row so a rerun with the same
    configuration reproduces it byte for byte.
    """

    def __init__(self, root: Path, provenance: Dict[str, object]):
        self.root = Path(root)
        self.provenance = provenance
        self.written: List[Path] = []
        self.root.mkdir(parents=True, exist_ok=True)

    def _provenance_row(self) -> List[str]:
        return [PROVENANCE_MARK] + [f"{k}={_fmt(v)}" for k, v in self.provenance.items()]

    def write_csv(
        self,
        name: str,
        header: Sequence[str],
        rows: Iterable[Sequence[object]],
        trailer: Sequence[Sequence[object]] = (),
    ) -> Path:
        path = self.root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(self._provenance_row())
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
            for row in trailer:
                writer.writerow([_fmt(v) for v in row])
        self.written.append(path)
        return path

    def write_field(self, name: str, field: Field) -> Path:
        grid = field.grid
        path = self.root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(self._provenance_row())
            writer.writerow(
                [
                    FIELD_MARK,
                    f"center={_fmt(grid.center)}",
                    f"dx={_fmt(grid.spacing)}",
                    f"n={grid.count}",
                ]
            )
            writer.writerow(["x", "re", "im"])
            for x, v in zip(grid.points, field.values):
                writer.writerow([_fmt(x), _fmt(v.real), _fmt(v.imag)])
        self.written.append(path)
        return path

    def write_decomposition(self, name: str, decomposition: BubbleDecomposition) -> Path:
        """Directory with manifest.csv, summary.csv, core_<k>.csv and remainder.csv."""
        directory = Path(name)
        rows = []
        for k, profile in enumerate(decomposition.profiles):
            p = profile.params
            rows.append(
                [
                    k,
                    profile.piece,
                    profile.alpha,
                    p.h,
                    p.xi,
                    p.x0,
                    p.t0,
                    profile.core.norm(),
                    profile.functional,
                ]
            )
            self.write_field(str(directory / f"core_{k}.csv"), profile.core)
        self.write_csv(
            str(directory / "manifest.csv"),
            ["index", "piece", "alpha", "h", "xi", "x0", "t0", "norm2", "functional"],
            rows,
        )
        self.write_csv(
            str(directory / "summary.csv"),
            [
                "profiles",
                "delta",
                "l2_gap",
                "reconstruction_error",
                "remainder_functional",
                "remainder_strichartz",
                "stage_one_converged",
            ],
            [
                [
                    len(decomposition.profiles),
                    decomposition.delta,
                    decomposition.l2_gap,
                    decomposition.reconstruction_error,
                    decomposition.remainder_functional,
                    decomposition.remainder_strichartz,
                    decomposition.stage_one_converged,
                ]
            ],
        )
        self.write_field(str(directory / "remainder.csv"), decomposition.remainder)
        return self.root / directory

    def close(self) -> None:
        logger.debug("Closed artifact store", root=str(self.root), files=len(self.written))


def read_field(path: Path) -> Field:
    """Read a field dump written by ArtifactStore.write_field."""
    meta: Dict[str, str] = {}
    xs, values = [], []
    try:
        handle = Path(path).open(newline="", encoding="utf-8")
    except OSError as exc:
        raise InvalidDataError(f"cannot read field dump {path}: {exc}", "input") from exc
    with handle:
        for row in csv.reader(handle):
            if not row:
                continue
            if row[0] == FIELD_MARK:
                meta = dict(item.split("=", 1) for item in row[1:])
                continue
            if row[0].startswith("#") or row[0] == "x":
                continue
            try:
                xs.append(float(row[0]))
                values.append(complex(float(row[1]), float(row[2])))
            except (IndexError, ValueError) as exc:
                raise InvalidDataError(f"malformed field row {row!r} in {path}", "input") from exc
    if not {"center", "dx", "n"} <= meta.keys():
        raise InvalidDataError(f"{path} has no '{FIELD_MARK}' header row", "input")
    try:
        grid = SpatialGrid(
            center=float(meta["center"]), spacing=float(meta["dx"]), count=int(meta["n"])
        )
        return Field(grid=grid, values=values)
    except ValueError as exc:
        raise InvalidDataError(f"{path}: {exc}", "input") from exc


@contextmanager
def get_store(root: Path, provenance: Dict[str, object]) -> Iterator[ArtifactStore]:
    store = ArtifactStore(root, provenance)
    try:
        yield store
    finally:
        store.close()
