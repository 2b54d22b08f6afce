import numpy as np
import pytest

from src.core import analysis
from src.core.dynamics import simulate_game
from src.core.strategies import (
    ConstantArrival,
    ConstantMaxAttacker,
    NonIdlingDefender,
    PiecewiseLinearArrival,
    PulseAttacker,
    SeededRandomAttacker,
    SinusoidArrival,
    TheoremDefender,
    ZeroAttacker,
)
from src.exceptions import NotStabilizableError, UndefinedConditionError
from src.models import TerminationKind, Verdict
from src.schemas import GameParams, InitialState, Scenario

def params(mu=3.0, nu=1.0, alpha_max=1.0, k=1.0, q1_max=5.0) -> GameParams:
    return GameParams(mu=mu, nu=nu, alpha_max=alpha_max, k=k, q1_max=q1_max)

class TestClosedForms:
    @pytest.mark.parametrize("mu, nu, alpha_max, expected", [(3, 1, 1, 1.0), (2, 1, 1, 0.0), (1, 2, 2, -3.0)])
    def test_epsilon(self, mu, nu, alpha_max, expected):
        assert analysis.epsilon(params(mu=mu, nu=nu, alpha_max=alpha_max)) == expected

    @pytest.mark.parametrize("q2, mu, expected", [(2.0, 3.0, 2.0), (0.0, 3.0, 0.0), (3.0, 2.5, 6.0)])
    def test_t2_star(self, q2, mu, expected):
        assert analysis.t2_star(InitialState(q1=1.0, q2=q2), params(mu=mu)) == pytest.approx(expected)

    @pytest.mark.parametrize("q1, q2, k, expected", [(2.0, 2.0, 1.0, 4.0), (2.0, 2.0, 0.0, 2.0), (2.0, 0.0, 1.0, 2.0)])
    def test_q1_peak_bound(self, q1, q2, k, expected):
        assert analysis.q1_peak_bound(InitialState(q1=q1, q2=q2), params(k=k)) == pytest.approx(expected)

    @pytest.mark.parametrize("q1, q2, expected", [(2.0, 2.0, 6.0), (3.0, 0.0, 3.0), (0.0, 2.0, 4.0)])
    def test_t1_bound(self, q1, q2, expected):
        assert analysis.t1_bound(InitialState(q1=q1, q2=q2), params()) == pytest.approx(expected)

    def test_queue_growth(self):
        assert analysis.queue_growth(InitialState(q1=2.0, q2=2.0), params()) == pytest.approx(2.0)

    def test_classic_draining_time(self):
        assert analysis.classic_draining_time(10.0, params()) == pytest.approx(5.0)
        assert analysis.classic_draining_time(0.0, params()) == 0.0
        with pytest.raises(NotStabilizableError):
            analysis.classic_draining_time(1.0, params(mu=1.0))

    def test_bounds_need_surplus(self):
        with pytest.raises(UndefinedConditionError):
            analysis.t1_bound(InitialState(q1=1.0, q2=1.0), params(mu=2.0))

    def test_t1_bound_never_increases_with_mu(self):
        q0 = InitialState(q1=2.0, q2=2.0)
        bounds = [analysis.t1_bound(q0, params(mu=mu)) for mu in np.linspace(2.1, 10.0, 50)]
        assert all(later <= earlier for earlier, later in zip(bounds, bounds[1:]))

class TestCheckConditions:
    def test_reference_game(self, sec4_params, sec4_q0):
        report = analysis.check_conditions(sec4_params, sec4_q0)
        assert report.both_hold
        assert report.t1_bound == pytest.approx(6.0)
        assert report.q1_peak_bound == pytest.approx(4.0)
        assert report.classic_draining_time == pytest.approx(1.0)

    def test_tight_capacity(self, sec4_q0):
        report = analysis.check_conditions(params(q1_max=3.9), sec4_q0)
        assert report.condition1 and report.condition2 is False
        assert not report.both_hold

    def test_no_surplus(self, sec4_q0):
        report = analysis.check_conditions(params(nu=3.0), sec4_q0)
        assert not report.condition1
        assert report.condition2 is None
        assert report.t1_bound is None

def _play(scenario, attacker=None, arrival=None, defender=None):
    traj = simulate_game(
        scenario,
        defender or TheoremDefender(scenario.simulation.tol),
        attacker or ConstantMaxAttacker(),
        arrival or ConstantArrival(),
    )
    return traj, analysis.verify_theorem(traj, scenario.q0, scenario.params, scenario.simulation.tol)

class TestVerifyTheorem:
    def test_reference_game_is_verified(self, make_scenario):
        traj, report = _play(make_scenario())
        assert report.verdict is Verdict.VERIFIED, report.notes
        assert report.t2_observed == pytest.approx(2.0, abs=2e-3)
        assert report.q1_peak_observed == pytest.approx(4.0, abs=1e-3)
        assert report.t1_observed == pytest.approx(6.0, abs=2e-3)
        assert report.admissibility_ok and report.q1_max_respected

    def test_weaker_attack_drains_sooner(self, make_scenario):
        _, report = _play(make_scenario(), attacker=ZeroAttacker())
        assert report.verdict is Verdict.VERIFIED
        assert report.t1_observed < report.t1_bound

    def test_violated_capacity_overflows(self, make_scenario):
        traj, report = _play(make_scenario(params={"q1_max": 3.9}))
        assert traj.termination.kind is TerminationKind.OVERFLOW
        assert traj.q1.max() > 3.9
        assert not report.condition2_ok
        assert report.verdict is Verdict.CONDITION_VIOLATED_DEMONSTRATED

    def test_capacity_at_peak_bound_is_verified(self, make_scenario):
        traj, report = _play(make_scenario(params={"q1_max": 4.0 + 1e-6}))
        assert traj.termination.kind is TerminationKind.DRAINED
        assert report.verdict is Verdict.VERIFIED, report.notes

    def test_violated_condition_without_overflow(self, make_scenario):
        _, report = _play(make_scenario(params={"q1_max": 3.9}), attacker=ZeroAttacker())
        assert report.termination is TerminationKind.DRAINED
        assert report.verdict is Verdict.CONDITIONS_NOT_MET

    def test_other_defenders_are_not_applicable(self, make_scenario):
        scenario = make_scenario(q0={"q1": 2.0, "q2": 0.0}, defender={"kind": "non_idling"})
        _, report = _play(scenario, attacker=ZeroAttacker(), defender=NonIdlingDefender())
        assert report.verdict is Verdict.NOT_APPLICABLE

def _random_game(index: int):
    rng = np.random.default_rng(1000 + index)
    eps = rng.uniform(0.1, 5.0)
    nu, alpha_max = rng.uniform(0.0, 2.0, size=2)
    game = dict(mu=nu + alpha_max + eps, nu=nu, alpha_max=alpha_max, k=rng.uniform(0.0, 3.0))
    q0 = InitialState(q1=rng.uniform(0.1, 5.0), q2=rng.uniform(0.0, 3.0))
    probe = GameParams(**game, q1_max=1e9)
    t1 = analysis.t1_bound(q0, probe)
    dt = max(t1 / 400.0, 1e-3)
    scenario = Scenario.model_validate({
        "params": {**game, "q1_max": analysis.q1_peak_bound(q0, probe) + 1.0},
        "q0": q0.model_dump(),
        "simulation": {"dt": dt, "t_max": 1.5 * t1 + 10 * dt, "tol": 1e-6},
    })
    return scenario, t1, int(rng.integers(0, 2**31))

@pytest.mark.parametrize("index", range(100))
def test_theorem_defender_drains_random_games(index):
    scenario, t1, seed = _random_game(index)
    p, dt = scenario.params, scenario.simulation.dt
    attackers = [
        ConstantMaxAttacker(),
        ZeroAttacker(),
        PulseAttacker(period=max(t1 / 7.0, dt), duty=0.6),
        SeededRandomAttacker(seed=seed, hold=max(t1 / 50.0, dt)),
    ]
    arrivals = [
        ConstantArrival(),
        SinusoidArrival(mean=p.alpha_max / 2, amplitude=p.alpha_max / 2, period=max(t1 / 5.0, dt)),
        PiecewiseLinearArrival([(0.0, 0.0), (t1 / 3.0 + dt, p.alpha_max), (t1, 0.25 * p.alpha_max)]),
    ]
    assert analysis.check_conditions(p, scenario.q0).both_hold
    for attacker in attackers:
        for arrival in arrivals:
            traj, report = _play(scenario, attacker=attacker, arrival=arrival)
            assert traj.termination.kind is TerminationKind.DRAINED
            assert traj.termination.t <= t1 + 2 * dt + 1e-9
            assert traj.q1.max() <= p.q1_max + 1e-6
            assert report.verdict is Verdict.VERIFIED, report.notes
