"""Simulation kit: compilation, fixed-step integration, document export."""

import math

import pytest

import sskr_forge.cma as cma
import sskr_forge.simkit as sim


def _ode(derivatives: dict[str, list[str]], trace: str = "test") -> cma.ModelSpec:
    doc = {
        "framework": "ode",
        "variables": list(derivatives),
        "derivatives": derivatives,
        "pde": [],
        "trace": trace,
    }
    return cma.spec_from_jsonable(doc)


DECAY = _ode({"X": ["-X"]})


@pytest.fixture()
def sir_spec(toy_sir):
    return cma.spec_from_sskr(toy_sir)


@pytest.fixture()
def sir_params(toy_sir):
    return {p.id: p.value for p in toy_sir.parameters}


class TestCompile:
    def test_rhs_matches_hand_computation(self, sir_spec, sir_params):
        m = sim.compile(sir_spec, sir_params)
        ds, di, dr = m([0.99, 0.01, 0.0])
        assert ds == pytest.approx(-0.3 * 0.99 * 0.01, rel=1e-15)
        assert di == pytest.approx(0.3 * 0.99 * 0.01 - 0.1 * 0.01, rel=1e-15)
        assert dr == pytest.approx(0.1 * 0.01, rel=1e-15)
        assert m.params == {"beta": 0.3, "gamma": 0.1}
        assert "def _rhs" in m.source

    def test_missing_parameter(self, sir_spec):
        with pytest.raises(sim.UnresolvedParameter) as err:
            sim.compile(sir_spec, {"beta": 0.3})
        assert err.value.param_id == "gamma"

    def test_transition_net_cannot_compile(self):
        spec = cma.ModelSpec(framework="petri", variables=("X",), derivatives={})
        with pytest.raises(sim.UnsupportedFramework):
            sim.compile(spec, {})

    def test_spatial_spec_cannot_compile(self, fx):
        with open(fx("mucus_statements.txt")) as fh:
            statements = cma.parse_statements(fh)
        rules = cma.load_rules(fx("mucus_rules.json"))
        table = cma.load_table(fx("mucus_ontology.json"))
        planned = cma.plan(statements, rules, table, goal="pde")
        assert isinstance(planned, cma.Planned)
        with pytest.raises(sim.UnsupportedPde):
            sim.compile(planned.spec, {})

    def test_named_forms_are_inlined(self):
        spec = _ode({"X": ["H(X, 1, 0.5, 2)", "-k*X"]})
        m = sim.compile(spec, {"k": 2.0})
        x = 0.75
        hill = 1.0 * x**2 / (0.5**2 + x**2)
        assert m([x])[0] == pytest.approx(hill - 2.0 * x, rel=1e-12)

    def test_input_state_is_checked(self):
        m = sim.compile(DECAY, {})
        with pytest.raises(sim.NumericalBlowup) as err:
            m([math.nan])
        assert err.value.step is None and err.value.variable == "X"


class TestComplexConstants:
    """Rules may phrase a real function through C; the compiled model must
    stay real-valued on the trajectory."""

    IDENT = _ode({"X": ["(e^(i*X) - e^(-i*X))/(2*i)"]})

    def test_exponential_form_equals_sine(self):
        m = sim.compile(self.IDENT, {})
        for x in (0.0, 0.3, 1.0, 2.5, -1.2):
            assert m([x])[0] == pytest.approx(math.sin(x), abs=1e-12)

    def test_trajectory_stays_real(self):
        m = sim.compile(self.IDENT, {})
        traj = sim.simulate(m, sim.SimConfig(solver="rk4", dt=0.01, t_end=2.0,
                                             initial={"X": 0.1}))
        assert all(isinstance(x, float) for row in traj.states for x in row)

    def test_imaginary_residue_is_rejected(self):
        m = sim.compile(_ode({"X": ["i + X"]}), {})
        with pytest.raises(ArithmeticError):
            m([1.0])


def _decay_error(solver: str, dt: float) -> float:
    m = sim.compile(DECAY, {})
    traj = sim.simulate(m, sim.SimConfig(solver=solver, dt=dt, t_end=1.0,
                                         initial={"X": 1.0}))
    return abs(traj.states[-1][0] - math.exp(-1.0))


class TestSolvers:
    @pytest.mark.parametrize("solver,order", [("euler", 1), ("rk2", 2), ("rk4", 4)])
    def test_convergence_order(self, solver, order):
        # halving dt must cut the global error by about 2^order
        ratio = _decay_error(solver, 0.02) / _decay_error(solver, 0.01)
        assert 2**order * 0.8 < ratio < 2**order * 1.25

    def test_population_is_conserved(self, sir_spec, sir_params):
        m = sim.compile(sir_spec, sir_params)
        traj = sim.simulate(m, sim.SimConfig(solver="rk4", dt=0.1, t_end=40.0,
                                             params=sir_params,
                                             initial={"S": 0.99, "I": 0.01, "R": 0.0}))
        totals = [sum(row) for row in traj.states]
        assert max(abs(tot - 1.0) for tot in totals) < 1e-12

    def test_grid_lands_on_exact_multiples(self):
        m = sim.compile(DECAY, {})
        traj = sim.simulate(m, sim.SimConfig(solver="euler", dt=0.1, t_end=0.5,
                                             initial={"X": 1.0}))
        assert traj.times == (0.0, 0.1, 0.2, 0.30000000000000004, 0.4, 0.5)

    def test_partial_final_step(self):
        m = sim.compile(DECAY, {})
        traj = sim.simulate(m, sim.SimConfig(solver="rk4", dt=0.1, t_end=1.05,
                                             initial={"X": 1.0}))
        assert traj.times[-1] == 1.05
        assert traj.times[-2] == pytest.approx(1.0)
        assert traj.states[-1][0] == pytest.approx(math.exp(-1.05), rel=1e-5)

    def test_stride_keeps_every_nth_and_the_last(self):
        m = sim.compile(DECAY, {})
        traj = sim.simulate(m, sim.SimConfig(solver="rk4", dt=0.1, t_end=1.05,
                                             stride=5, initial={"X": 1.0}))
        assert traj.times == (0.0, 0.5, 1.0, 1.05)

    def test_knockout_pins_a_variable_to_zero(self, sir_spec, sir_params):
        m = sim.compile(sir_spec, sir_params)
        traj = sim.simulate(m, sim.SimConfig(solver="rk4", dt=0.1, t_end=10.0,
                                             initial={"S": 0.99, "I": 0.01, "R": 0.0},
                                             knockouts=frozenset({"I"})))
        assert set(traj.column("I")) == {0.0}
        # with no infected pool, susceptibles never move
        assert traj.column("S")[-1] == 0.99

    def test_finite_time_blowup_is_reported(self):
        m = sim.compile(_ode({"X": ["X*X"]}), {})
        with pytest.raises(sim.NumericalBlowup) as err:
            sim.simulate(m, sim.SimConfig(solver="euler", dt=0.01, t_end=5.0,
                                          initial={"X": 1.0}))
        assert err.value.step is not None and err.value.variable == "X"

    def test_trajectory_helpers(self, sir_spec, sir_params):
        m = sim.compile(sir_spec, sir_params)
        traj = sim.simulate(m, sim.SimConfig(solver="rk4", dt=0.5, t_end=1.0,
                                             initial={"S": 0.99, "I": 0.01, "R": 0.0}))
        assert traj.column("S") == tuple(row[0] for row in traj.states)
        assert traj.final() == dict(zip(traj.variables, traj.states[-1]))


class TestConfigValidation:
    def _cfg(self, **kw):
        base = dict(solver="rk4", dt=0.1, t_end=1.0, initial={"X": 1.0})
        base.update(kw)
        return sim.SimConfig(**base)

    @pytest.mark.parametrize("patch", [
        {"solver": "rk5"},
        {"dt": 0.0},
        {"dt": -0.1},
        {"t_end": 0.0},
        {"dt": 2.0},                       # dt > t_end
        {"stride": 0},
        {"stride": 1.5},
        {"initial": {}},                   # missing variable
        {"initial": {"X": 1.0, "Q": 2.0}},  # unknown variable
        {"knockouts": frozenset({"Q"})},
    ])
    def test_rejected(self, patch):
        with pytest.raises(sim.InvalidConfig):
            self._cfg(**patch).validate(("X",))

    def test_accepted(self):
        self._cfg().validate(("X",))


class TestCsvExport:
    def test_shape_and_precision(self):
        m = sim.compile(DECAY, {})
        traj = sim.simulate(m, sim.SimConfig(solver="rk4", dt=0.25, t_end=1.0,
                                             initial={"X": 1.0}))
        text = sim.to_csv(traj)
        lines = text.splitlines()
        assert lines[0] == "t,X"
        assert len(lines) == len(traj.times) + 1
        assert text.endswith("\n")
        # 17 significant digits reparse to the exact float
        for line, t, row in zip(lines[1:], traj.times, traj.states):
            cells = [float(c) for c in line.split(",")]
            assert cells == [t, *row]


class TestSimulationDocument:
    def test_golden_document(self, fx, sir_spec, sir_params):
        cfg = sim.SimConfig(solver="rk4", dt=0.1, t_end=40.0, stride=5,
                            initial={"S": 0.99, "I": 0.01, "R": 0.0},
                            params=sir_params)
        with open(fx("toy_sir_document.txt"), encoding="utf-8") as fh:
            assert sim.emit_simulation_document(sir_spec, cfg) == fh.read()

    def test_hill_terms_are_labeled(self):
        spec = _ode({"G": ["H(P2, 1, 0.5, 2)"], "P2": ["-k*P2"]})
        cfg = sim.SimConfig(solver="euler", dt=0.1, t_end=1.0,
                            initial={"G": 0.0, "P2": 1.0}, params={"k": 0.2})
        doc = sim.emit_simulation_document(spec, cfg)
        assert "d[G]/dt += H(P2, 1, 0.5, 2);  // rate=Hill" in doc
        assert "d[P2]/dt += -k*P2;  // rate=MassAction" in doc

    def test_knockouts_are_recorded(self, sir_spec, sir_params):
        cfg = sim.SimConfig(solver="rk2", dt=0.1, t_end=1.0,
                            initial={"S": 0.99, "I": 0.01, "R": 0.0},
                            params=sir_params, knockouts=frozenset({"I", "R"}))
        assert "knockout = (I, R);" in sim.emit_simulation_document(sir_spec, cfg)

    def test_document_rejects_what_compile_rejects(self, sir_spec):
        cfg = sim.SimConfig(solver="rk4", dt=0.1, t_end=1.0,
                            initial={"S": 0.99, "I": 0.01, "R": 0.0})
        with pytest.raises(sim.UnresolvedParameter):
            sim.emit_simulation_document(sir_spec, cfg)
