"""Acceptance suite.

Each test covers one numbered acceptance criterion and prints a single
``[PASS]``/``[FAIL]`` line for it (written through the capture plumbing so
the verdict is visible in a normal pytest run). Tolerances appear inline
exactly as stated; none are loosened.
"""

import numpy as np
import pytest

from welcherweg import (
    BeamSplitterSpec,
    DegenerateOutcome,
    EntanglementSpec,
    InterferometerConfig,
    MomentumGrid,
    PacketSpec,
    WhichWayDetectorSpec,
    default_grid,
    entangle,
    evolve,
    evolve_dense,
    gaussian,
    output_probabilities,
    overlap,
    path_coefficients,
    purity,
    reduce_postselect,
    reduce_statistical,
    sample_outcomes,
    shift,
    stern_gerlach,
    visibility,
)

S = 1 / np.sqrt(2)


@pytest.fixture
def verdict(capsys):
    """Emit one visible pass/fail line per criterion, then enforce it."""

    def check(criterion: str, ok: bool, detail: str = ""):
        tag = "PASS" if ok else "FAIL"
        suffix = f"  ({detail})" if detail else ""
        with capsys.disabled():
            print(f"[{tag}] {criterion}{suffix}")
        assert ok, f"{criterion}{suffix}"

    return check


def balanced(recoil=0.0):
    return BeamSplitterSpec(t=S, r=S, recoil=recoil)


def mz(phase=0.0, recoil=0.0, gamma=None, arm="reflected"):
    ww = None if gamma is None else WhichWayDetectorSpec(arm=arm, gamma=gamma)
    return InterferometerConfig(
        bs_in=balanced(recoil), bs_out=balanced(recoil), phase=phase, ww=ww
    )


def random_config(rng, packet=None):
    theta1, theta2 = rng.uniform(0, np.pi / 2, size=2)
    alpha = rng.uniform(0, 2 * np.pi, size=4)
    kwargs = {} if packet is None else {"packet": packet}
    maybe_ww = WhichWayDetectorSpec(
        arm="reflected" if rng.uniform() < 0.5 else "transmitted",
        gamma=rng.uniform(0.0, 1.0),
    )
    return InterferometerConfig(
        bs_in=BeamSplitterSpec(
            t=np.cos(theta1) * np.exp(1j * alpha[0]),
            r=np.sin(theta1) * np.exp(1j * alpha[1]),
            recoil=rng.uniform(0.0, 3.0),
            **kwargs,
        ),
        bs_out=BeamSplitterSpec(
            t=np.cos(theta2) * np.exp(1j * alpha[2]),
            r=np.sin(theta2) * np.exp(1j * alpha[3]),
            recoil=rng.uniform(0.0, 3.0),
            **kwargs,
        ),
        phase=rng.uniform(0, 2 * np.pi),
        ww=None if rng.uniform() < 0.25 else maybe_ww,
        input_port=1 if rng.uniform() < 0.5 else 2,
    )


def test_acceptance_01_ww_destroys_interference(verdict):
    phases = np.linspace(0, 2 * np.pi, 100, endpoint=False)
    worst = 0.0
    for phi in phases:
        p3 = output_probabilities(mz(phase=phi, gamma=0.0)).p3
        worst = max(worst, abs(p3 - 0.5))
    # general splitters, orthogonal detector: p3 = |t1 t2|^2 + |r1 r2|^2
    rng = np.random.default_rng(180)
    for _ in range(5):
        theta1, theta2 = rng.uniform(0, np.pi / 2, size=2)
        alpha = rng.uniform(0, 2 * np.pi, size=4)
        t1 = np.cos(theta1) * np.exp(1j * alpha[0])
        r1 = np.sin(theta1) * np.exp(1j * alpha[1])
        t2 = np.cos(theta2) * np.exp(1j * alpha[2])
        r2 = np.sin(theta2) * np.exp(1j * alpha[3])
        target = abs(t1 * t2) ** 2 + abs(r1 * r2) ** 2
        for phi in phases:
            config = InterferometerConfig(
                bs_in=BeamSplitterSpec(t=t1, r=r1),
                bs_out=BeamSplitterSpec(t=t2, r=r2),
                phase=phi,
                ww=WhichWayDetectorSpec(arm="reflected", gamma=0.0),
            )
            worst = max(worst, abs(output_probabilities(config).p3 - target))
    verdict(
        "criterion 1: orthogonal which-way detector eliminates interference",
        worst < 1e-10,
        f"max |p3 - target| = {worst:.3e}",
    )


def test_acceptance_02_ideal_fringes(verdict):
    phases = np.linspace(0, 2 * np.pi, 100, endpoint=False)
    worst = max(
        abs(output_probabilities(mz(phase=phi, gamma=1.0)).p3 - (1 - np.cos(phi)) / 2)
        for phi in phases
    )
    vis = visibility(mz(gamma=1.0))
    ok = worst < 1e-10 and abs(vis - 1.0) < 1e-10
    verdict(
        "criterion 2: ideal fringes p3 = (1 - cos phi)/2 with unit visibility",
        ok,
        f"max fringe error = {worst:.3e}, visibility = {vis:.12f}",
    )


def test_acceptance_03_macroscopic_overlap_limit(verdict):
    dp = 1e-4
    psi = gaussian(default_grid(), 0.0, 1.0)
    omega = abs(overlap(psi, shift(psi, dp)))
    deficit_error = abs((omega - 1.0) - (-1.25e-9))
    vis_deficit = 1.0 - visibility(mz(recoil=dp))
    ok = deficit_error < 2e-9 and vis_deficit < 1e-8
    verdict(
        "criterion 3: macroscopic splitters barely decohere (dp = 1e-4 sigma)",
        ok,
        f"|Omega|-1 = {omega - 1.0:.3e}, 1-V = {vis_deficit:.3e}",
    )


def test_acceptance_04_recoil_visibility_law(verdict):
    worst = 0.0
    for dp in (0.5, 1.0, 2.0):
        v = visibility(mz(recoil=dp))
        worst = max(worst, abs(v - np.exp(-dp**2 / 4.0)))
    verdict(
        "criterion 4: visibility follows exp(-dp^2/(4 sigma^2))",
        worst < 1e-6,
        f"max |V - exp| = {worst:.3e}",
    )


def test_acceptance_05_oracle_equivalence(verdict):
    rng = np.random.default_rng(500)
    worst_scalar = 0.0
    for _ in range(500):
        config = random_config(rng)
        pc = path_coefficients(config)
        probs = output_probabilities(config)
        worst_scalar = max(
            worst_scalar, abs(pc.p3 - probs.p3), abs(pc.p4 - probs.p4)
        )
    packet = PacketSpec(grid=MomentumGrid(-10.0, 10.0, 64))
    worst_dense = 0.0
    for _ in range(50):
        config = random_config(rng, packet=packet)
        fact = evolve(config).to_state().amplitudes
        dense = evolve_dense(config).amplitudes
        worst_dense = max(worst_dense, float(np.max(np.abs(fact - dense))))
    ok = worst_scalar < 1e-8 and worst_dense < 1e-10
    verdict(
        "criterion 5: scalar-coefficient and dense references agree with evolve",
        ok,
        f"scalar route {worst_scalar:.3e} (500 configs), dense route {worst_dense:.3e} (50 configs)",
    )


def test_acceptance_06_collapse_engine(verdict):
    spec = EntanglementSpec(
        amplitudes=(0.6, 0.8j),
        system_states=np.eye(2, dtype=complex),
        apparatus_states=np.eye(2, dtype=complex),
        eigenvalues=(1.0, -1.0),
    )
    psi = entangle(spec)
    rho = reduce_statistical(psi)
    diag_err = float(np.max(np.abs(np.diag(rho.matrix) - np.array([0.36, 0.64]))))
    off_diag = float(np.max(np.abs(rho.matrix - np.diag(np.diag(rho.matrix)))))
    out = reduce_postselect(psi, spec, 1)
    purity_err = abs(purity(out.post_state.to_density()) - 1.0)
    prob_err = abs(out.probability - 0.64)
    degenerate_spec = EntanglementSpec(
        amplitudes=(1.0, 0.0),
        system_states=np.eye(2, dtype=complex),
        apparatus_states=np.eye(2, dtype=complex),
        eigenvalues=(1.0, -1.0),
    )
    try:
        reduce_postselect(entangle(degenerate_spec), degenerate_spec, 1)
        degenerate_ok = False
    except DegenerateOutcome:
        degenerate_ok = True
    ok = (
        diag_err < 1e-12
        and off_diag < 1e-12
        and purity_err < 1e-12
        and prob_err < 1e-12
        and degenerate_ok
    )
    verdict(
        "criterion 6: statistical and postselected reductions behave",
        ok,
        f"weights {diag_err:.1e}, off-diag {off_diag:.1e}, purity {purity_err:.1e}, "
        f"probability {prob_err:.1e}, degenerate raises: {degenerate_ok}",
    )


def test_acceptance_07_stern_gerlach_sampling(verdict):
    spec = stern_gerlach(0.6, 0.8)
    psi = entangle(spec)
    shots = 100_000
    first = sample_outcomes(psi, spec, shots=shots, seed=2024)
    second = sample_outcomes(psi, spec, shots=shots, seed=2024)
    p = 0.36
    sigma = np.sqrt(p * (1 - p) / shots)
    deviation = abs(first.frequencies()[0] - p)
    ok = deviation < 5 * sigma and first.counts == second.counts
    verdict(
        "criterion 7: seeded spin sampling is faithful and reproducible",
        ok,
        f"|freq - 0.36| = {deviation:.2e} < 5 sigma = {5 * sigma:.2e}, "
        f"counts repeat: {first.counts == second.counts}",
    )


def test_acceptance_08_no_exit_splitter_limit(verdict):
    worst = 0.0
    t1, r1 = 0.8, 0.6
    for phi in np.linspace(0, 2 * np.pi, 25):
        omitted = output_probabilities(
            InterferometerConfig(
                bs_in=BeamSplitterSpec(t=t1, r=r1, recoil=0.7), phase=phi
            )
        )
        identity = output_probabilities(
            InterferometerConfig(
                bs_in=BeamSplitterSpec(t=t1, r=r1, recoil=0.7),
                bs_out=BeamSplitterSpec(t=1.0, r=0.0),
                phase=phi,
            )
        )
        worst = max(
            worst,
            abs(omitted.p3 - identity.p3),
            abs(omitted.p4 - identity.p4),
            abs(omitted.p3 - t1**2),
        )
    verdict(
        "criterion 8: omitting the exit splitter equals t2=1, r2=0 and kills fringes",
        worst < 1e-12,
        f"max deviation = {worst:.3e}",
    )


def test_acceptance_09_ww_arm_symmetry(verdict):
    worst = 0.0
    for gamma in (0.0, 0.3, 0.7, 1.0):
        for phi in np.linspace(0, 2 * np.pi, 13):
            for recoil in (0.0, 0.5):
                reflected = output_probabilities(
                    mz(phase=phi, recoil=recoil, gamma=gamma, arm="reflected")
                )
                transmitted = output_probabilities(
                    mz(phase=phi, recoil=recoil, gamma=gamma, arm="transmitted")
                )
                worst = max(
                    worst,
                    abs(reflected.p3 - transmitted.p3),
                    abs(reflected.p4 - transmitted.p4),
                )
    verdict(
        "criterion 9: detector arm choice is irrelevant for balanced splitters",
        worst < 1e-12,
        f"max |reflected - transmitted| = {worst:.3e}",
    )


def test_acceptance_10_complementarity_saturation(verdict):
    worst = 0.0
    for gamma in (0.0, 0.25, 0.5, 0.75, 1.0):
        v = visibility(mz(gamma=gamma))
        worst = max(worst, abs(v**2 + (1 - gamma**2) - 1.0))
    verdict(
        "criterion 10: V^2 + (1 - gamma^2) = 1 at zero recoil",
        worst < 1e-8,
        f"max saturation defect = {worst:.3e}",
    )
