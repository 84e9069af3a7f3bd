import numpy as np
import pytest

from slowfast.models.network import Reaction, ReactionNetwork
from slowfast.models.settings import IntegratorConfig
from slowfast.models.system import eval_h
from slowfast.services.integration_service import integrate
from slowfast.services.manifold_service import sample_manifold
from slowfast.systems.registry import REGISTRY, get_example


def in_row_space(laws: np.ndarray, vector: list[float]) -> bool:
    v = np.asarray(vector, dtype=float)
    residual = v - laws.T @ (laws @ v)
    return float(np.linalg.norm(residual)) <= 1e-10


@pytest.mark.parametrize("name", REGISTRY.names())
def test_coordinates_transcribe_the_network(name):
    example = get_example(name)
    rng = np.random.default_rng(11)
    points = sample_manifold(example.manifold, 6, rng).points
    points = np.vstack([points, example.region.sample_interior(6, rng)])
    for eps in (0.1, 0.01):
        network = example.network(eps)
        kept = [network.species.index(s) for s in example.coordinates]
        for x in points:
            rhs = network.rhs(network.concentrations(example.lift(x, eps)))
            assert rhs[kept] == pytest.approx(eval_h(example.system, x, eps), abs=1e-12)


def test_michaelis_menten_conservation_laws():
    network = get_example("mm_reversible_small_e0").network(0.1)
    laws = network.conservation_laws()
    assert laws.shape == (2, 4)
    assert laws @ network.stoichiometric_matrix() == pytest.approx(np.zeros((2, 3)), abs=1e-12)
    # (E, S, C, P): total enzyme and total substrate
    assert in_row_space(laws, [1.0, 0.0, 1.0, 0.0])
    assert in_row_space(laws, [0.0, 1.0, 1.0, 1.0])


@pytest.mark.parametrize("name", ["comp_inhibition_small_e0", "maltose_transport"])
def test_three_conservation_laws(name):
    network = get_example(name).network(0.1)
    laws = network.conservation_laws()
    assert laws.shape[0] == 3
    assert laws @ laws.T == pytest.approx(np.eye(3), abs=1e-12)


def test_mass_action_rates():
    network = ReactionNetwork(
        ("A", "B", "C"),
        (Reaction({"A": 2}, {"B": 1}, 3.0, "2A->B"), Reaction({"B": 1}, {"C": 1}, 0.5, "B->C")),
    )
    assert network.stoichiometric_matrix().tolist() == [[-2.0, 0.0], [1.0, -1.0], [0.0, 1.0]]
    assert network.rates([2.0, 4.0, 0.0]) == pytest.approx([12.0, 2.0])
    assert network.rhs([2.0, 4.0, 0.0]) == pytest.approx([-24.0, 10.0, 2.0])


def test_unknown_species_is_rejected():
    with pytest.raises(ValueError, match="unknown species"):
        ReactionNetwork(("A",), (Reaction({"A": 1}, {"Z": 1}, 1.0, "A->Z"),))


@pytest.mark.parametrize("name", REGISTRY.names())
def test_network_trajectories_conserve_stoichiometric_totals(name):
    example = get_example(name)
    network = example.network(0.1)
    laws = network.conservation_laws()
    start = network.concentrations(example.lift(example.initial_state, 0.1))
    cfg = IntegratorConfig(method="explicit", rtol=1e-8, atol=1e-10)
    trajectory = integrate(network.rhs, start, (0.0, 5.0), cfg)
    totals = trajectory.states @ laws.T
    assert np.max(np.abs(totals - totals[0])) <= 1e-10 * max(1.0, float(np.max(np.abs(start))))
