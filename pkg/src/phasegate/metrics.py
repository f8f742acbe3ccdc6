"""Ideal-process construction and figures of merit.

The ideal programmable phase gate with programmed angle ``phi`` has the
rank-1 Choi matrix ``chi_id = |w><w|`` with ``|w> = |00> + e^{i phi}
|11>`` (trace 2).  Reconstructed processes are scored against it with

    F_chi = Tr[chi chi_id] / (Tr[chi] Tr[chi_id]) ,

and reconstructed output states with the usual pure-target fidelity
``<psi| rho |psi>`` and purity ``Tr[rho^2]``.  A merit report aggregates
these over the six cardinal input states for one phase setting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataFormatError
from .gate import canonical_phase, ideal_output
from .linalg import eig_hermitian
from .states import STATE_LABELS, as_state, ket
from .tomography import require_density_matrix

#: chi_id must be rank 1; the second eigenvalue may be at most this
#: fraction of the trace.
RANK1_RTOL = 1e-8

MERIT_CSV_HEADER = "phi,F_chi,F_av,F_min,P_av,P_min,feed_forward_active,success_probability"


def ideal_choi(phi: float) -> np.ndarray:
    """Rank-1 Choi matrix of the perfect gate: ``|w><w|``, ``|w> = |00> + e^{i phi}|11>``."""
    w = np.array([1.0, 0.0, 0.0, np.exp(1j * phi)], dtype=complex)
    return np.outer(w, w.conj())


def process_fidelity(chi, chi_id) -> float:
    """Overlap fidelity against a rank-1 ideal process, scale-invariant.

    Rejects a ``chi_id`` that is not rank 1 (the formula presumes a
    one-dimensional projector up to scale).
    """
    chi = np.asarray(chi, dtype=complex)
    chi_id = np.asarray(chi_id, dtype=complex)
    tr = float(np.trace(chi).real)
    tr_id = float(np.trace(chi_id).real)
    if tr <= 0.0 or tr_id <= 0.0:
        raise ValueError(f"process fidelity needs positive traces, got {tr:.3e} and {tr_id:.3e}")
    w, _ = eig_hermitian(chi_id)
    if w[-2] > RANK1_RTOL * tr_id:
        raise ValueError(f"chi_id is not rank 1 (second eigenvalue {w[-2]:.3e} vs trace {tr_id:.3e})")
    return float(np.trace(chi @ chi_id).real) / (tr * tr_id)


def state_fidelity(rho, psi_target) -> float:
    """``<psi|rho|psi>`` for a pure target given as label or amplitude pair."""
    rho = require_density_matrix(rho)
    psi = as_state(psi_target)
    return float(np.real(np.vdot(psi, rho @ psi)))


def purity(rho) -> float:
    """``Tr[rho^2]``; 1 for pure states, 1/2 for the maximally mixed qubit."""
    rho = require_density_matrix(rho)
    return float(np.trace(rho @ rho).real)


@dataclass(frozen=True)
class MeritReport:
    """One row of the results table: all merits for one (phase, analysis) pair."""

    phi: float
    F_chi: float
    F_av: float
    F_min: float
    P_av: float
    P_min: float
    feed_forward_active: bool
    success_probability: float

    def __post_init__(self):
        object.__setattr__(self, "phi", canonical_phase(self.phi))
        slack = 1e-10
        for name in ("F_chi", "F_av", "F_min", "P_av", "P_min", "success_probability"):
            v = getattr(self, name)
            if not (-slack <= v <= 1.0 + slack):
                raise ValueError(f"{name} = {v!r} outside [0, 1]")
        if self.F_min > self.F_av + slack or self.P_min > self.P_av + slack:
            raise ValueError("minimum merit exceeds its average")


def merit_report(chi, output_states, phi: float, feed_forward_active: bool,
                 success_probability: float) -> MeritReport:
    """Score one reconstructed process and its six output states.

    ``output_states`` must hold exactly six density matrices in the
    fixed input order {0, 1, +, -, +i, -i}; each is compared against the
    nominal target ``U(phi)|psi_in>`` (the commanded phase, not any
    jittered one).
    """
    if len(output_states) != len(STATE_LABELS):
        raise ValueError(f"expected {len(STATE_LABELS)} output states, got {len(output_states)}")
    fidelities = []
    purities = []
    for label, rho in zip(STATE_LABELS, output_states):
        target = ideal_output(ket(label), phi)
        fidelities.append(state_fidelity(rho, target))
        purities.append(purity(rho))
    return MeritReport(
        phi=phi,
        F_chi=process_fidelity(chi, ideal_choi(phi)),
        F_av=float(np.mean(fidelities)),
        F_min=float(np.min(fidelities)),
        P_av=float(np.mean(purities)),
        P_min=float(np.min(purities)),
        feed_forward_active=feed_forward_active,
        success_probability=success_probability,
    )


def write_merit_csv(path, reports) -> None:
    """Serialize report rows; flag column is 1/0, numbers at 9 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(MERIT_CSV_HEADER + "\n")
        for r in reports:
            f.write(
                f"{r.phi:.12g},{r.F_chi:.9g},{r.F_av:.9g},{r.F_min:.9g},"
                f"{r.P_av:.9g},{r.P_min:.9g},{int(r.feed_forward_active)},{r.success_probability:.9g}\n"
            )


def read_merit_csv(path):
    """Load rows written by :func:`write_merit_csv`."""
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().rstrip("\n")
        if header != MERIT_CSV_HEADER:
            raise DataFormatError(f"bad merit CSV header: expected {MERIT_CSV_HEADER!r}, got {header!r}")
        reports = []
        for lineno, line in enumerate(f, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 8:
                raise DataFormatError(f"line {lineno}: expected 8 fields, got {len(parts)}")
            try:
                reports.append(
                    MeritReport(
                        phi=float(parts[0]),
                        F_chi=float(parts[1]),
                        F_av=float(parts[2]),
                        F_min=float(parts[3]),
                        P_av=float(parts[4]),
                        P_min=float(parts[5]),
                        feed_forward_active=bool(int(parts[6])),
                        success_probability=float(parts[7]),
                    )
                )
            except ValueError as exc:
                raise DataFormatError(f"line {lineno}: {exc}") from exc
    return reports


def format_merit_table(reports) -> str:
    """Human-readable table, one block per feed-forward variant."""
    lines = []
    for active in (True, False):
        rows = [r for r in reports if r.feed_forward_active == active]
        if not rows:
            continue
        label = "with feed forward" if active else "without feed forward"
        lines.append(f"{label} (success probability {rows[0].success_probability:.3f})")
        lines.append(f"{'phi':>10}  {'F_chi':>7}  {'F_av':>7}  {'F_min':>7}  {'P_av':>7}  {'P_min':>7}")
        for r in sorted(rows, key=lambda r: r.phi):
            lines.append(
                f"{r.phi:10.6f}  {r.F_chi:7.4f}  {r.F_av:7.4f}  {r.F_min:7.4f}  {r.P_av:7.4f}  {r.P_min:7.4f}"
            )
        lines.append("")
    gap = max_feedforward_gap(reports)
    if gap is not None:
        value, phi = gap
        lines.append(f"max |F_chi(with FF) - F_chi(without FF)| = {value:.6f} at phi = {phi:.6f}")
    return "\n".join(lines) + "\n"


def max_feedforward_gap(reports):
    """Largest per-phase |Delta F_chi| between the two analyses, or None.

    Only phases present in both variants enter the comparison.
    """
    with_ff = {r.phi: r.F_chi for r in reports if r.feed_forward_active}
    without_ff = {r.phi: r.F_chi for r in reports if not r.feed_forward_active}
    common = sorted(set(with_ff) & set(without_ff))
    if not common:
        return None
    gaps = [(abs(with_ff[p] - without_ff[p]), p) for p in common]
    return max(gaps)
