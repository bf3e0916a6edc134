"""Command line behavior: spec parsing, exit codes, JSON artifacts."""

import json
import subprocess
import sys

import pytest

jsonschema = pytest.importorskip("jsonschema")

from subelliptic.cli import (
    EXIT_INPUT,
    EXIT_OK,
    EXIT_REFUSED,
    EXIT_UNDECIDED,
    SpecFileError,
    load_spec,
    main,
    spec_from_dict,
    trace_schema,
)
from subelliptic.kohn import run_kohn
from subelliptic.polyring import canonical_str


def write_spec(tmp_path, data, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


FLAT = {"name": "flat", "f": ["w"]}
CP325 = {"name": "cross-power(3,2,5)", "params": {"tau": 3, "l": 2, "k": 5}}
CP324 = {"name": "cross-power(3,2,4)", "params": {"tau": 3, "l": 2, "k": 4}}
BORDERLINE = {
    "name": "borderline",
    "f": ["w + w^5", "w^2"],
    "g": ["w"],
    "sample_radius": 0.01,
}


class TestSpecLoading:
    def test_minimal_spec_defaults(self, tmp_path):
        """Name falls back to the file stem and the radius to 0.1."""
        spec = load_spec(write_spec(tmp_path, {"f": ["w"]}, name="disc.json"))
        assert spec.name == "disc"
        assert canonical_str(spec.f[0]) == "w"
        assert spec.g == ()
        assert spec.sample_radius == 0.1

    def test_full_spec_round_trip(self, tmp_path):
        spec = load_spec(write_spec(tmp_path, BORDERLINE))
        assert spec.name == "borderline"
        assert [canonical_str(p) for p in spec.f] == ["w + w^5", "w^2"]
        assert [canonical_str(p) for p in spec.g] == ["w"]
        assert spec.sample_radius == 0.01

    def test_family_params_expand_before_anything_runs(self):
        spec = spec_from_dict(CP325)
        assert canonical_str(spec.f[0]) == "w^3 + z^5*w^2"
        assert spec.params == {"tau": 3, "l": 2, "k": 5}

    def test_family_with_l_zero_drops_the_w_factor(self, capsys):
        spec = spec_from_dict({"params": {"tau": 3, "l": 0, "k": 5}})
        assert canonical_str(spec.f[0]) == "w^3 + z^5"
        assert "warning" in capsys.readouterr().err

    def test_out_of_window_params_warn_but_run(self, capsys):
        spec = spec_from_dict({"params": {"tau": 2, "l": 1, "k": 3}})
        err = capsys.readouterr().err
        assert "k > tau > l > 0" in err
        assert canonical_str(spec.f[0]) == "w^2 + z^3*w"

    def test_in_window_params_stay_silent(self, capsys):
        spec_from_dict(CP325)
        assert capsys.readouterr().err == ""

    def test_nonpositive_exponents_are_hard_errors(self):
        with pytest.raises(SpecFileError, match="out of range"):
            spec_from_dict({"params": {"tau": 0, "l": 0, "k": 3}})

    def test_conjugate_variables_rejected(self):
        with pytest.raises(SpecFileError, match="holomorphic"):
            spec_from_dict({"f": ["wb"]})

    def test_syntax_errors_cite_the_position(self):
        with pytest.raises(SpecFileError, match="line 1"):
            spec_from_dict({"f": ["w^"]})

    def test_unknown_keys_rejected(self):
        with pytest.raises(SpecFileError, match="unknown spec keys"):
            spec_from_dict({"f": ["w"], "radius": 0.2})

    def test_f_and_params_are_mutually_exclusive(self):
        with pytest.raises(SpecFileError, match="not both"):
            spec_from_dict({"f": ["w"], "params": {"tau": 3, "l": 2, "k": 5}})

    def test_empty_component_list_rejected(self):
        with pytest.raises(SpecFileError, match="at least one"):
            spec_from_dict({"f": []})

    def test_bad_radius_rejected(self):
        with pytest.raises(SpecFileError):
            spec_from_dict({"f": ["w"], "sample_radius": -0.5})
        with pytest.raises(SpecFileError, match="positive number"):
            spec_from_dict({"f": ["w"], "sample_radius": True})


class TestExitCodes:
    def test_levi_on_flat_prints_the_unit(self, tmp_path, capsys):
        code = main(["levi", write_spec(tmp_path, FLAT)])
        assert code == EXIT_OK
        assert capsys.readouterr().out.strip() == "1"

    def test_type_reports_bound_and_witness(self, tmp_path, capsys):
        code = main(["type", write_spec(tmp_path, CP325)])
        assert code == EXIT_OK
        assert capsys.readouterr().out.strip() == "type >= 6 (witness (0, t))"

    def test_kohn_success_line(self, tmp_path, capsys):
        code = main(["kohn", write_spec(tmp_path, CP325)])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert out.strip() == "unit found, step 2, order 1/40, max radical order 5"

    def test_kohn_stall_exits_two(self, tmp_path, capsys):
        code = main(["kohn", write_spec(tmp_path, CP325), "--max-steps", "1"])
        assert code == EXIT_UNDECIDED
        assert "stalled after 1 steps" in capsys.readouterr().out

    def test_missing_file_exits_one(self, tmp_path, capsys):
        code = main(["levi", str(tmp_path / "absent.json")])
        assert code == EXIT_INPUT
        assert "cannot read spec file" in capsys.readouterr().err

    def test_invalid_json_exits_one(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text('{"f": [', encoding="utf-8")
        code = main(["levi", str(path)])
        assert code == EXIT_INPUT
        assert "invalid JSON" in capsys.readouterr().err

    def test_effective_refuses_failed_hypothesis(self, tmp_path, capsys):
        code = main(
            ["effective", write_spec(tmp_path, BORDERLINE), "--samples", "200"]
        )
        captured = capsys.readouterr()
        assert code == EXIT_REFUSED
        assert "hypothesis failed" in captured.out
        assert "refused" in captured.err

    def test_effective_force_runs_but_marks_unsound(self, tmp_path, capsys):
        code = main(
            [
                "effective",
                write_spec(tmp_path, BORDERLINE),
                "--samples",
                "200",
                "--force",
            ]
        )
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "UNSOUND" in out

    def test_effective_assert_hypo_skips_sampling(self, tmp_path, capsys):
        code = main(
            ["effective", write_spec(tmp_path, BORDERLINE), "--assert-hypo"]
        )
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "asserted" in out
        assert "delta_hat" not in out
        assert "unit found, component 0, tau 1, order 1/4" in out

    def test_check_hypo_exit_tracks_the_gate(self, tmp_path, capsys):
        ok = main(["check-hypo", write_spec(tmp_path, FLAT), "--samples", "100"])
        assert ok == EXIT_OK
        bad = main(
            ["check-hypo", write_spec(tmp_path, BORDERLINE), "--samples", "200"]
        )
        assert bad == EXIT_REFUSED
        assert "hypothesis fails" in capsys.readouterr().out

    def test_verify_passes_on_flat(self, tmp_path, capsys):
        code = main(["verify", write_spec(tmp_path, FLAT), "--samples", "100"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "finite difference check" in out
        assert "boundary Levi minimum" in out

    def test_compare_prints_exact_fractions(self, tmp_path, capsys):
        code = main(["compare", write_spec(tmp_path, CP325), "--samples", "50"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        rows = {
            line.split()[0]: line.split()[-1]
            for line in out.splitlines()
            if line and not line.startswith("hypothesis")
        }
        assert rows["type"] == "6"
        assert rows["optimal"] == "1/6"
        assert rows["classic"] == "1/40"
        assert rows["effective"] == "1/16"

    def test_orders_never_printed_as_decimals(self, tmp_path, capsys):
        main(["kohn", write_spec(tmp_path, CP324)])
        out = capsys.readouterr().out
        assert "1/32" in out
        assert "0.03" not in out and "0.031" not in out


@pytest.fixture(scope="module")
def trace(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("trace")
    spec_path = write_spec(tmp, CP324)
    out_path = tmp / "trace.json"
    code = main(["kohn", spec_path, "--json", str(out_path)])
    assert code == EXIT_OK
    return json.loads(out_path.read_text(encoding="utf-8"))


class TestJsonArtifacts:
    def test_schema_file_is_itself_valid(self):
        jsonschema.Draft202012Validator.check_schema(trace_schema())

    def test_kohn_trace_validates_against_schema(self, trace):
        jsonschema.validate(trace, trace_schema())

    def test_trace_brackets_and_config_echo(self, trace):
        assert trace["events"][0]["kind"] == "init"
        assert trace["events"][-1]["kind"] == "outcome"
        assert trace["config"]["max_steps"] == 16
        assert trace["config"]["radical_cap"] == 32
        assert trace["spec"]["f"] == ["w^3 + z^4*w^2"]
        assert trace["summary"].startswith("unit found")

    def test_flattened_certificates_carry_steps(self, trace):
        assert trace["certificates"], "expected at least one radical certificate"
        for cert in trace["certificates"]:
            assert cert["step"] >= 1
            assert "/" in cert["multiplier_order"] or cert["multiplier_order"] == "1"

    def test_rerun_from_spec_echo_reproduces_events(self, trace):
        """The artifact carries everything needed to replay the run."""
        echo = trace["spec"]
        replayed = spec_from_dict(
            {
                "name": echo["name"],
                "f": echo["f"],
                "g": echo["g"],
                "sample_radius": echo["sample_radius"],
            }
        )
        result = run_kohn(
            replayed,
            max_steps=trace["config"]["max_steps"],
            radical_cap=trace["config"]["radical_cap"],
        )
        assert json.loads(json.dumps(list(result.events))) == trace["events"]

    def test_effective_artifact_records_soundness(self, tmp_path):
        out_path = tmp_path / "eff.json"
        code = main(
            [
                "effective",
                write_spec(tmp_path, BORDERLINE),
                "--samples",
                "200",
                "--force",
                "--json",
                str(out_path),
            ]
        )
        assert code == EXIT_OK
        payload = json.loads(out_path.read_text(encoding="utf-8"))
        assert payload["hypothesis"] == "failed"
        assert payload["sound"] is False
        assert payload["final_order"] == "1/4"
        assert [step["order"] for step in payload["chain"]] == ["1/4"]

    def test_compare_artifact_uses_fraction_strings(self, tmp_path):
        out_path = tmp_path / "cmp.json"
        code = main(
            [
                "compare",
                write_spec(tmp_path, CP324),
                "--samples",
                "50",
                "--json",
                str(out_path),
            ]
        )
        assert code == EXIT_OK
        payload = json.loads(out_path.read_text(encoding="utf-8"))
        assert payload["table"] == {
            "type": "6",
            "optimal": "1/6",
            "classic": "1/32",
            "effective": "1/16",
        }


class TestConsoleEntry:
    def test_module_invocation(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "subelliptic.cli", "levi", write_spec(tmp_path, FLAT)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.strip() == "1"

    def test_package_entry_point(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "subelliptic", "type", write_spec(tmp_path, FLAT)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.strip() == "type >= 2 (witness (0, t))"

    def test_help_lists_subcommands(self):
        proc = subprocess.run(
            [sys.executable, "-m", "subelliptic.cli", "--help"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        for name in ("levi", "type", "kohn", "effective", "check-hypo", "verify", "compare"):
            assert name in proc.stdout
