"""Resumable checkpoint files for prime streams.

Layout (UTF-8, LF)::

    # mertens-lab <version> checkpoint x=<x> segment_width=<W> checkpoint_stride=<k>
    x,pi,theta,psi,sum_recip_p,...,comp_recip_p,comp_theta
    <one row per stride boundary, then the terminal row>
    # end rows=<n> crc32=<hex> state=<x>:<pi>:<hex sums>

The trailer carries the exact integer accumulators of the last row, so a
resumed run continues from bit-identical state.  The file is rewritten
atomically at every checkpoint, so an interrupted run leaves a valid file.
"""

from __future__ import annotations

import math
import os
import zlib
from pathlib import Path

from . import __version__
from .sieve import SieveConfig
from .streaming import FIELDS, StreamState, SumSnapshot, stream_primes

HEADER = (
    "x,pi,theta,psi,sum_recip_p,sum_logp_over_p,log_prod_minus,log_prod_plus,"
    "comp_recip_p,comp_theta"
)


class CorruptCheckpointError(RuntimeError):
    pass


class ResumeRangeError(ValueError):
    """New bound lies below what the checkpoint already covers."""


def fmt(v: float) -> str:
    return format(v, ".17g")


def format_row(s: SumSnapshot) -> str:
    vals = [
        str(s.x),
        str(s.pi),
        fmt(s.theta.hi),
        fmt(s.psi.hi),
        fmt(s.sum_recip_p.hi),
        fmt(s.sum_logp_over_p.hi),
        fmt(s.log_prod_minus.hi),
        fmt(s.log_prod_plus.hi),
        fmt(s.sum_recip_p.lo),
        fmt(s.theta.lo),
    ]
    return ",".join(vals)


def _meta(x: int, config: SieveConfig) -> str:
    return (
        f"# mertens-lab {__version__} checkpoint x={x} "
        f"segment_width={config.segment_width} checkpoint_stride={config.checkpoint_stride}"
    )


def _encode_state(s: SumSnapshot) -> str:
    sums = ",".join(format(v, "x") if v >= 0 else "-" + format(-v, "x") for v in s.exact)
    return f"{s.x}:{s.pi}:{sums}"


def _decode_state(text: str) -> StreamState:
    x, pi, sums = text.split(":")
    values = [int(v, 16) for v in sums.split(",")]
    if len(values) != len(FIELDS):
        raise CorruptCheckpointError("state has wrong number of accumulators")
    return StreamState(int(x), int(pi), values)


def render(rows: list[str], last: SumSnapshot, config: SieveConfig) -> str:
    body = "\n".join([_meta(last.x, config), HEADER, *rows]) + "\n"
    crc = zlib.crc32(body.encode("utf-8"))
    return body + f"# end rows={len(rows)} crc32={crc:08x} state={_encode_state(last)}\n"


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _is_boundary(x: int, config: SieveConfig) -> bool:
    b = x + 1
    w = config.segment_width
    return b % w == 0 and (b // w) % config.checkpoint_stride == 0


def run_checkpointed(x_max: float, path: str | os.PathLike, config: SieveConfig | None = None) -> SumSnapshot:
    """Stream to ``x_max`` from scratch, writing ``path`` at every checkpoint."""
    config = config or SieveConfig()
    return _drive([], None, math.floor(x_max), Path(path), config)


def _drive(rows: list[str], state: StreamState | None, n_max: int, path: Path, config: SieveConfig) -> SumSnapshot:
    def on_checkpoint(s: SumSnapshot) -> None:
        row = format_row(s)
        if not rows or rows[-1] != row:
            rows.append(row)
        _write_atomic(path, render(rows, s, config))

    final = stream_primes(n_max, config=config, resume=state, on_checkpoint=on_checkpoint)
    row = format_row(final)
    if not rows or rows[-1] != row:
        rows.append(row)
    _write_atomic(path, render(rows, final, config))
    return final


def read_checkpoint(path: str | os.PathLike) -> tuple[list[str], StreamState, SieveConfig]:
    """Validate a checkpoint file and return (rows, last state, config)."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CorruptCheckpointError(f"cannot read checkpoint: {exc}") from exc
    lines = text.split("\n")
    if len(lines) < 4 or lines[-1] != "" or not lines[-2].startswith("# end "):
        raise CorruptCheckpointError("missing trailer (truncated file?)")
    trailer = lines[-2]
    body = "\n".join(lines[:-2]) + "\n"
    try:
        fields = dict(kv.split("=", 1) for kv in trailer[len("# end ") :].split())
        n_rows = int(fields["rows"])
        crc = int(fields["crc32"], 16)
        state = _decode_state(fields["state"])
        meta = dict(kv.split("=", 1) for kv in lines[0].split()[4:])
        config = SieveConfig(
            segment_width=int(meta["segment_width"]),
            checkpoint_stride=int(meta["checkpoint_stride"]),
        )
    except (KeyError, ValueError) as exc:
        raise CorruptCheckpointError(f"malformed checkpoint: {exc}") from exc
    if zlib.crc32(body.encode("utf-8")) != crc:
        raise CorruptCheckpointError("crc32 mismatch")
    if not lines[0].startswith("# mertens-lab ") or lines[1] != HEADER:
        raise CorruptCheckpointError("bad metadata or header line")
    rows = lines[2:-2]
    if len(rows) != n_rows or not rows:
        raise CorruptCheckpointError("row count mismatch")
    if format_row(state.snapshot()) != rows[-1]:
        raise CorruptCheckpointError("trailer state disagrees with last row")
    return rows, state, config


def resume(path: str | os.PathLike, new_x_max: float, workers: int = 1) -> SumSnapshot:
    """Continue a checkpoint file up to ``new_x_max``.

    The finished file is byte-identical to an uninterrupted run.
    """
    path = Path(path)
    rows, state, config = read_checkpoint(path)
    n_max = math.floor(new_x_max)
    if n_max < state.x:
        raise ResumeRangeError(f"new x {n_max} is below checkpoint x {state.x}")
    config = SieveConfig(config.segment_width, workers, config.checkpoint_stride)
    if not _is_boundary(state.x, config):
        # terminal row of the earlier run; its state is carried, the row is not
        rows = rows[:-1]
    return _drive(rows, state, n_max, path, config)
