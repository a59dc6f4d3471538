import numpy as np
import pytest

import wulffclusters as wc
from wulffclusters.clusters import (standard_lens_cluster,
                                    standard_triod_cluster, translate_body)
from wulffclusters.verify import (DiscreteEnergyProblem, hausdorff_gap,
                                  minimize_fixed_topology, perturbation_test,
                                  polyline_energy, verify_cluster)


def lens(a=None, res=256):
    return standard_lens_cluster(a or wc.euclidean(), 0.0, 1.0, 6.0,
                                 resolution=res)


def test_polyline_energy_matches_segments():
    a = wc.elliptic(2, 1)
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 2.0]])
    # horizontal segment has normal (0, 1): weight b = 1; vertical segment
    # has normal (1, 0): weight a = 2
    assert polyline_energy(a, pts) == pytest.approx(1.0 * 1 + 2.0 * 2,
                                                    rel=1e-12)


def test_problem_energy_matches_cluster_perimeter():
    from wulffclusters.clusters import cluster_perimeter
    a = wc.p_norm(4)
    c = lens(a)
    p = DiscreteEnergyProblem(a, c)
    assert p.energy(p.coords0) == pytest.approx(cluster_perimeter(a, c),
                                                rel=1e-12)


def test_problem_areas_match_m():
    a = wc.euclidean()
    c = standard_triod_cluster(a, 0.0, 2.5, 8.0, resolution=256)
    p = DiscreteEnergyProblem(a, c)
    assert np.allclose(p.areas(p.coords0), p.target_areas, rtol=1e-10)
    assert p.target_areas[0] == pytest.approx(2.5, rel=1e-8)


def test_descent_stays_at_standard():
    a = wc.euclidean()
    c = lens(a)
    opt, info = minimize_fixed_topology((a, c))
    p = DiscreteEnergyProblem(a, c)
    e0 = p.energy(p.coords0)
    assert abs(info["energy"] - e0) <= 1e-4 * e0
    assert hausdorff_gap(c, opt, modulo_translation=True) <= 5 * 2e-2


def test_descent_from_perturbed_init_returns():
    a = wc.elliptic(2, 1)
    c = lens(a)
    p = DiscreteEnergyProblem(a, c)
    e0 = p.energy(p.coords0)
    opt, info = minimize_fixed_topology(p, seed=3)
    assert abs(info["energy"] - e0) <= 1e-4 * e0


def test_perturbation_gap_nonnegative():
    a = wc.smoothed_l1(0.05)
    c = lens(a)
    r = perturbation_test(a, c, trials=100, seed=1)
    assert r["passed"]
    assert r["min_gap"] >= -1e-9


def test_zero_amplitude_perturbation_gap_is_zero():
    a = wc.euclidean()
    c = lens(a)
    r = perturbation_test(a, c, trials=1, amplitude=0.0, seed=0)
    # the first trial is always the identity perturbation
    assert r["min_gap"] == 0.0


def test_hausdorff_gap_identity_and_translation():
    import copy
    c = lens()
    assert hausdorff_gap(c, c) == 0.0
    # a rigid translate of every interface point is killed by the
    # modulo-translation quotient
    t = copy.deepcopy(c)
    for itf in t.interfaces:
        itf.points = itf.points + np.array([0.07, -0.03])
    assert hausdorff_gap(c, t) >= 0.05
    assert hausdorff_gap(c, t, modulo_translation=True) <= 1e-9
    # translate_body reconnects the exterior segments to the ball, so the
    # quotient gap is positive but smaller than the raw gap
    tb = translate_body(c, [0.07, -0.03])
    raw = hausdorff_gap(c, tb)
    mod = hausdorff_gap(c, tb, modulo_translation=True)
    assert 0 < mod < raw


def test_verify_cluster_report():
    a = wc.euclidean()
    c = lens(a)
    rep = verify_cluster(a, c, n_perturbations=50, seed=0)
    assert rep.passed
    assert rep.consistency_half_sum
    assert not rep.crossings
    assert max(rep.young_residuals) <= 1e-10
    d = rep.to_dict()
    assert set(d) == {"config", "energy_standard", "energy_found",
                      "hausdorff_gap", "young_residuals", "perturbation",
                      "consistency_half_sum", "crossings", "passed"}
