import json

import pytest

from unlearn_gauge.baselines import (
    GenEntry,
    GenerationLog,
    TruthRatioLog,
    write_generation_log,
    write_truth_ratio_log,
)
from unlearn_gauge.cli import main
from unlearn_gauge.score_log import CtcsSample, write_score_log
from unlearn_gauge.simulate import ctcs_to_score_log, default_scenario, save_scenario


def write_sample_log(tmp_path, name, values, model="m", model_role="M_u",
                     dataset="d", dataset_role="D_f"):
    sample = CtcsSample(model_id=model, dataset_id=dataset, values=values)
    path = tmp_path / name
    write_score_log(ctcs_to_score_log(sample, model_role, dataset_role), path)
    return path


@pytest.fixture
def quadruple(tmp_path):
    vals = [0.2, 0.5, 0.9]
    return {
        "u_f": write_sample_log(tmp_path, "u_f.jsonl", vals),
        "o_f": write_sample_log(tmp_path, "o_f.jsonl", vals, model="o", model_role="M_o"),
        "u_v": write_sample_log(tmp_path, "u_v.jsonl", vals, dataset="v", dataset_role="D_v"),
        "o_v": write_sample_log(tmp_path, "o_v.jsonl", vals, model="o", model_role="M_o",
                                dataset="v", dataset_role="D_v"),
    }


class TestValidate:
    def test_valid_files_exit_zero(self, tmp_path, capsys, quadruple):
        code = main(["validate", str(quadruple["u_f"]), str(quadruple["o_v"])])
        out = capsys.readouterr().out
        assert code == 0
        assert out.count("\tOK\t") == 2

    def test_invalid_file_exit_one(self, tmp_path, capsys):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"model_id": "m"}\n')
        code = main(["validate", str(bad)])
        out = capsys.readouterr().out
        assert code == 1
        assert "ERROR" in out

    def test_dataset_and_generation_kinds(self, tmp_path, capsys):
        data = tmp_path / "data.jsonl"
        data.write_text(json.dumps({"id": "q1", "question": "?", "answer": "a",
                                    "core_words": ["a"]}) + "\n")
        gen = tmp_path / "gen.jsonl"
        write_generation_log(GenerationLog(
            model_id="m", model_role="M_u", dataset_id="d", dataset_role="D_f",
            entries=[GenEntry(record_id="r", prompt_kind="qa",
                              generated_text="x", reference_text="y")],
        ), gen)
        assert main(["validate", str(data), str(gen)]) == 0
        out = capsys.readouterr().out
        assert "dataset, 1 records" in out
        assert "generation log, 1 entries" in out

    def test_truth_ratio_kind(self, tmp_path, capsys):
        tr = tmp_path / "tr.jsonl"
        write_truth_ratio_log(TruthRatioLog(model_id="m", model_role="M_r",
                                            dataset_id="d", values=[0.5, 1.5]), tr)
        assert main(["validate", str(tr)]) == 0
        assert "truth-ratio log, 2 values" in capsys.readouterr().out


class TestDcue:
    def test_identical_logs_score_one(self, capsys, quadruple):
        code = main(["dcue",
                     "--u-f", str(quadruple["u_f"]), "--o-f", str(quadruple["o_f"]),
                     "--u-v", str(quadruple["u_v"]), "--o-v", str(quadruple["o_v"])])
        out = capsys.readouterr().out
        assert code == 0
        header, row = out.strip().split("\n")
        values = dict(zip(header.split("\t"), row.split("\t")))
        assert values["r_dcue"] == "1.0"

    def test_jsonl_format(self, capsys, quadruple):
        code = main(["--format", "jsonl", "dcue",
                     "--u-f", str(quadruple["u_f"]), "--o-f", str(quadruple["o_f"]),
                     "--u-v", str(quadruple["u_v"]), "--o-v", str(quadruple["o_v"])])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["r_dcue"] == 1.0
        assert set(payload) == {"s_ouf", "s_ouv", "delta_s", "s_corr", "n_eff", "r_dcue"}

    def test_out_file(self, tmp_path, quadruple):
        out_path = tmp_path / "result.jsonl"
        code = main(["--format", "jsonl", "--out", str(out_path), "dcue",
                     "--u-f", str(quadruple["u_f"]), "--o-f", str(quadruple["o_f"]),
                     "--u-v", str(quadruple["u_v"]), "--o-v", str(quadruple["o_v"])])
        assert code == 0
        assert json.loads(out_path.read_text())["r_dcue"] == 1.0


class TestBaseline:
    def test_text_metric(self, tmp_path, capsys):
        gen = tmp_path / "gen.jsonl"
        write_generation_log(GenerationLog(
            model_id="m", model_role="M_u", dataset_id="d", dataset_role="D_f",
            entries=[GenEntry(record_id="r", prompt_kind="qa",
                              generated_text="a b", reference_text="a b")],
        ), gen)
        assert main(["--format", "jsonl", "baseline", "qa", "--gen", str(gen)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["metric_name"] == "qa"
        assert payload["value"] == 1.0

    def test_tr_eval_without_retrained_input(self, capsys):
        code = main(["baseline", "tr_eval"])
        err = capsys.readouterr().err
        assert code == 1
        assert "retrained" in err

    def test_tr_eval_with_wrong_role(self, tmp_path, capsys):
        tr_u = tmp_path / "tr_u.jsonl"
        write_truth_ratio_log(TruthRatioLog(model_id="m", model_role="M_u",
                                            dataset_id="d", values=[0.5, 0.7]), tr_u)
        code = main(["baseline", "tr_eval", "--tr-r", str(tr_u), "--tr-u", str(tr_u)])
        err = capsys.readouterr().err
        assert code == 1
        assert "retrained" in err

    def test_tr_eval_happy_path(self, tmp_path, capsys):
        tr_r = tmp_path / "tr_r.jsonl"
        tr_u = tmp_path / "tr_u.jsonl"
        vals = [0.1, 0.4, 0.9, 1.3]
        write_truth_ratio_log(TruthRatioLog(model_id="r", model_role="M_r",
                                            dataset_id="d", values=vals), tr_r)
        write_truth_ratio_log(TruthRatioLog(model_id="u", model_role="M_u",
                                            dataset_id="d", values=vals), tr_u)
        code = main(["--format", "jsonl", "baseline", "tr_eval",
                     "--tr-r", str(tr_r), "--tr-u", str(tr_u)])
        assert code == 0
        assert json.loads(capsys.readouterr().out)["value"] == 1.0

    def test_privleak_from_aucs(self, capsys):
        code = main(["--format", "jsonl", "baseline", "privleak",
                     "--auc-u", "0.75", "--auc-r", "0.5"])
        assert code == 0
        assert json.loads(capsys.readouterr().out)["value"] == 0.5

    def test_privleak_requires_retrained_auc(self, capsys):
        code = main(["baseline", "privleak", "--auc-u", "0.75"])
        assert code == 1
        assert "retrained" in capsys.readouterr().err

    def test_privleak_from_score_logs(self, tmp_path, capsys):
        member_u = write_sample_log(tmp_path, "mu.jsonl", [0.9, 0.95])
        nonmember_u = write_sample_log(tmp_path, "nu.jsonl", [0.1, 0.2],
                                       dataset="h", dataset_role="holdout")
        member_r = write_sample_log(tmp_path, "mr.jsonl", [0.5, 0.6], model_role="M_r")
        nonmember_r = write_sample_log(tmp_path, "nr.jsonl", [0.5, 0.6],
                                       model_role="M_r", dataset="h", dataset_role="holdout")
        code = main(["--format", "jsonl", "baseline", "privleak",
                     "--member-u", str(member_u), "--nonmember-u", str(nonmember_u),
                     "--member-r", str(member_r), "--nonmember-r", str(nonmember_r)])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["value"] == 1.0  # (1.0 - 0.5) / 0.5

    def test_privleak_requires_retrained_logs(self, tmp_path, capsys):
        member_u = write_sample_log(tmp_path, "mu.jsonl", [0.9])
        code = main(["baseline", "privleak", "--member-u", str(member_u)])
        assert code == 1
        assert "retrained" in capsys.readouterr().err


class TestMetaAndReport:
    def test_meta_table(self, tmp_path, capsys):
        config = tmp_path / "meta.yaml"
        config.write_text(
            "metrics:\n"
            "  - name: dcue\n"
            "    values: {M_r: 1.0, M_t: 0.0, M_u: 1.0,\n"
            "             postpro_ul: 1.0, postpro_ft: 1.0, postpro_mix: 1.0}\n"
            "  - name: fb\n"
            "    values: {M_r: 0.1853, M_t: 0.2487}\n"
        )
        assert main(["meta", "--config", str(config)]) == 0
        out = capsys.readouterr().out
        lines = out.strip().split("\n")
        assert lines[0].startswith("metric\tpractical")
        assert lines[1].split("\t")[2] == "1.0000"
        assert lines[2].split("\t")[2] == "0.8147"

    def test_meta_jsonl_feeds_report(self, tmp_path, capsys):
        config = tmp_path / "meta.yaml"
        config.write_text("metrics:\n  - name: tr_eval\n    values: {M_r: 1.0}\n")
        reports = tmp_path / "reports.jsonl"
        assert main(["--format", "jsonl", "--out", str(reports),
                     "meta", "--config", str(config)]) == 0
        assert main(["report", str(reports)]) == 0
        out = capsys.readouterr().out
        assert "tr_eval\tno\t1.0000" in out


class TestSimulate:
    def test_default_scenario_agreement(self, capsys):
        code = main(["simulate"])
        out = capsys.readouterr().out
        assert code == 0
        assert out.strip().split("\n")[-1] == "agreement\t100/100"

    def test_scenario_file_and_out(self, tmp_path, capsys):
        scenario = tmp_path / "scenario.yaml"
        save_scenario(default_scenario(n_trials=5), scenario)
        table = tmp_path / "trials.tsv"
        code = main(["--out", str(table), "simulate", "--scenario", str(scenario)])
        out = capsys.readouterr().out
        assert code == 0
        assert "agreement\t5/5" in out
        assert table.read_text().startswith("trial_index\tp_direct\tp_approx\n")

    def test_seed_flag_is_deterministic(self, capsys):
        assert main(["simulate", "--seed", "5"]) == 0
        first = capsys.readouterr().out
        assert main(["simulate", "--seed", "5"]) == 0
        second = capsys.readouterr().out
        assert first == second

    def test_different_seeds_differ(self, capsys):
        assert main(["simulate", "--seed", "5"]) == 0
        first = capsys.readouterr().out
        assert main(["simulate", "--seed", "6"]) == 0
        second = capsys.readouterr().out
        assert first != second


class TestLosses:
    def test_single_bundle_flags(self, capsys):
        code = main(["losses", "--loss", "npo", "--nll-theta", "1.0",
                     "--nll-ref", "1.0", "--beta", "1.0"])
        out = capsys.readouterr().out
        assert code == 0
        name, value = out.strip().split("\t")
        assert name == "npo"
        assert float(value) == pytest.approx(2 * 1.3862943611198906 / 2, rel=1e-12)

    def test_bundle_file_all_losses(self, tmp_path, capsys):
        bundles = tmp_path / "bundles.jsonl"
        rows = [
            {"nll_theta": 1.0, "nll_ref": 1.0, "nll_retain": 1.0,
             "nll_idk": 1.0, "nll_idk_ref": 1.0},
            {"nll_theta": 2.0, "nll_ref": 2.0, "nll_retain": 2.0,
             "nll_idk": 2.0, "nll_idk_ref": 2.0},
        ]
        bundles.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
        code = main(["--format", "jsonl", "losses", "--bundles", str(bundles)])
        out_lines = capsys.readouterr().out.strip().split("\n")
        assert code == 0
        payloads = {json.loads(l)["loss"]: json.loads(l) for l in out_lines}
        assert set(payloads) == {"ga", "gd", "idk", "dpo", "npo", "simnpo"}
        assert payloads["ga"]["value"] == 1.5
        assert payloads["ga"]["count"] == 2

    def test_missing_inputs(self, capsys):
        assert main(["losses", "--loss", "npo"]) == 1
        assert "nll-theta" in capsys.readouterr().err

    def test_unknown_bundle_field(self, tmp_path, capsys):
        bundles = tmp_path / "bundles.jsonl"
        bundles.write_text('{"nll_theta": 1.0, "mystery": 2}\n')
        assert main(["losses", "--bundles", str(bundles)]) == 1
        assert "mystery" in capsys.readouterr().err
