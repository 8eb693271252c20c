"""End-to-end analysis of one collision-model run.

Pipeline: evolve the physical state and the four tomography probes, rebuild
the cumulative maps from the probe Bloch vectors, form the single-step maps
by inverse composition, and evaluate every witness per collision. Record n
describes collision n (the step from state n-1 to state n); its ``delta_i``
is the QMI change realized by that collision.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import engine, tomography, witnesses
from .engine import RunConfig, Trajectory
from .model import SIGMA_X, SIGMA_Y, SIGMA_Z, probe_states
from .tomography import AffineBlochMap, SingularMapError
from .witnesses import EnergyBasis, WitnessRecord


@dataclass(frozen=True)
class RunSummary:
    """Aggregates of one run; indices are None when never positive."""

    n_max: int
    i_rhp: float
    i_lfs: float
    sum_nq: float
    first_nq_positive: int | None
    last_nq_positive: int | None
    first_g_positive: int | None
    last_g_positive: int | None
    implication_violations: int      # steps with N_q > tol but Choi min eig >= -tol
    max_off_pattern_residual: float
    max_abs_d: float
    tol_pos: float


@dataclass
class RunResult:
    """Everything the drivers and tests need from one analyzed run."""

    config: RunConfig
    physical: Trajectory
    probes: tuple[Trajectory, Trajectory, Trajectory, Trajectory]
    maps: list[AffineBlochMap]            # cumulative maps, n = 0..n_max
    records: list[WitnessRecord]          # collisions, n = 1..n_max
    summary: RunSummary
    elapsed: float = field(default=0.0, repr=False)

    def record_array(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])


def probe_bloch_history(probes) -> np.ndarray:
    """Bloch vectors of the four probe trajectories, shape (n+1, 4, 3)."""
    stacks = np.stack([t.system_states for t in probes], axis=1)
    pauli = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])
    return np.einsum("pij,nkji->nkp", pauli, stacks).real


def reconstruct_map_family(probes) -> list[AffineBlochMap]:
    """Cumulative affine maps from the probe trajectories."""
    blochs = probe_bloch_history(probes)
    return [tomography.reconstruct_affine(blochs[n]) for n in range(blochs.shape[0])]


def analyze(config: RunConfig) -> RunResult:
    """Run the full pipeline for one configuration.

    Raises SingularMapError (with the offending step index and the partially
    analyzed result attached as ``partial_result``) when a cumulative map
    cannot be inverted.
    """
    t_start = time.perf_counter()
    tol = config.tolerances
    batch = engine.evolve_batch(
        config,
        np.concatenate([config.initial_system[np.newaxis],
                        np.stack(probe_states())]))
    physical, probes = batch[0], tuple(batch[1:])

    maps = reconstruct_map_family(probes)
    sops_cum = [tomography.affine_to_superoperator(m) for m in maps]
    delta_i, i_lfs = witnesses.lfs_series(
        [tomography.choi(s) for s in sops_cum], tol_pos=tol.tol_pos)

    basis = EnergyBasis(omega_s=config.spins.omega_s)
    records: list[WitnessRecord] = []
    error: SingularMapError | None = None
    for n in range(1, config.n_max + 1):
        try:
            step_map = tomography.time_local_map(
                maps[n], maps[n - 1], cond_threshold=tol.cond_threshold,
                det_floor=tol.singular_det, step=n)
        except SingularMapError as exc:
            error = exc
            break
        sop = tomography.affine_to_superoperator(step_map)
        entries = tomography.extract_phase_covariant(sop, tol=tol.tol_pos)
        j_mat = tomography.choi(sop)
        choi_min = float(np.linalg.eigvalsh((j_mat + j_mat.conj().T) / 2)[0])
        g_n = witnesses.rhp_increment(j_mat)

        rho_pre = physical.system_states[n - 1]
        p0 = float(rho_pre[0, 0].real)
        p1 = float(rho_pre[1, 1].real)
        n_q = witnesses.nonpositivity(witnesses.kdq_general(sop, rho_pre, basis))
        _, margins = witnesses.cp_conditions(entries)

        records.append(WitnessRecord(
            n=n, p0=p0, p1=p1,
            a=entries.a, b=entries.b, c=entries.c, d=entries.d,
            residual=entries.off_pattern_residual,
            n_q=n_q, g_n=g_n, delta_i=float(delta_i[n - 1]),
            avg_de=witnesses.avg_energy_change(entries, p0, p1,
                                               config.spins.omega_s),
            c_abs2_margin=margins.c_margin, d_abs2_margin=margins.d_margin,
            choi_min_eig=choi_min))

    result = RunResult(
        config=config, physical=physical, probes=probes, maps=maps,
        records=records,
        summary=summarize(records, n_max=config.n_max, tol_pos=tol.tol_pos),
        elapsed=time.perf_counter() - t_start)
    if error is not None:
        error.partial_result = result
        raise error
    return result


def summarize(records, n_max: int, tol_pos: float = 1e-10) -> RunSummary:
    """Reduce per-collision records to run-level measures and indices."""
    nq = np.array([r.n_q for r in records])
    g = np.array([r.g_n for r in records])
    steps = np.array([r.n for r in records])

    def first_last(values):
        idx = steps[values > tol_pos]
        if idx.size == 0:
            return None, None
        return int(idx[0]), int(idx[-1])

    first_nq, last_nq = first_last(nq)
    first_g, last_g = first_last(g)
    delta_i = np.array([r.delta_i for r in records])
    violations = int(np.sum((nq > tol_pos)
                            & (np.array([r.choi_min_eig for r in records])
                               >= -tol_pos)))
    return RunSummary(
        n_max=n_max,
        i_rhp=witnesses.rhp_measure(g) if records else 0.0,
        i_lfs=float(delta_i[delta_i > tol_pos].sum()) if records else 0.0,
        sum_nq=float(nq[nq > tol_pos].sum()) if records else 0.0,
        first_nq_positive=first_nq, last_nq_positive=last_nq,
        first_g_positive=first_g, last_g_positive=last_g,
        implication_violations=violations,
        max_off_pattern_residual=float(max((r.residual for r in records),
                                           default=0.0)),
        max_abs_d=float(max((abs(r.d) for r in records), default=0.0)),
        tol_pos=tol_pos)
