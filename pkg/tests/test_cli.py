"""File formats, the run pipeline, exit codes and the benchmark harness."""

import json

import numpy as np
import pytest

from adplacer import io
from adplacer.cli import benchmark, main
from adplacer.core import RewardParams
from adplacer.errors import (
    DuplicateSceneId,
    ParseError,
    ValenceOutOfRange,
)
from adplacer.instances import random_instance
from adplacer.relevance import KeyframeFeatures

from util import make_inventory, make_program, two_ad_instance


def write_two_ad_instance(tmp_path, scale="unit"):
    factor = 100.0 if scale == "hundred" else 1.0
    program = {
        "format": io.PROGRAM_FORMAT,
        "scenes": [
            {"id": "s1", "valence": 0.9 * factor},
            {"id": "s2", "valence": 0.1 * factor},
            {"id": "s3", "valence": 0.8 * factor},
        ],
    }
    inventory = {
        "format": io.INVENTORY_FORMAT,
        "ads": [
            {"id": "a1", "valence": 0.8 * factor},
            {"id": "a2", "valence": 0.2 * factor},
        ],
    }
    (tmp_path / "program.json").write_text(json.dumps(program))
    (tmp_path / "inventory.json").write_text(json.dumps(inventory))
    np.savetxt(tmp_path / "rel.txt", np.ones((3, 2)), fmt="%.17g")
    return tmp_path / "program.json", tmp_path / "inventory.json", tmp_path / "rel.txt"


class TestProgramFiles:
    def test_round_trip(self, tmp_path):
        program = make_program(0.9, 0.1, 0.8)
        path = tmp_path / "p.json"
        io.save_program(program, path)
        again = io.load_program(path)
        assert again == program

    def test_hundred_scale(self, tmp_path):
        doc = {
            "format": io.PROGRAM_FORMAT,
            "scenes": [
                {"id": "s1", "valence": 90},
                {"id": "s2", "valence": 10},
                {"id": "s3", "valence": 80},
            ],
        }
        path = tmp_path / "p.json"
        path.write_text(json.dumps(doc))
        program = io.load_program(path, scale="hundred")
        assert [s.valence.value for s in program.scenes] == [0.9, 0.1, 0.8]
        assert program.slot_count == 2

    def test_empty_scene_list(self, tmp_path):
        path = tmp_path / "p.json"
        path.write_text(json.dumps({"format": io.PROGRAM_FORMAT, "scenes": []}))
        with pytest.raises(ParseError):
            io.load_program(path)

    def test_valence_out_of_range(self, tmp_path):
        doc = {
            "format": io.PROGRAM_FORMAT,
            "scenes": [{"id": "s1", "valence": 120}, {"id": "s2", "valence": 10}],
        }
        path = tmp_path / "p.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ValenceOutOfRange):
            io.load_program(path, scale="hundred")

    def test_duplicate_scene_id(self, tmp_path):
        doc = {
            "format": io.PROGRAM_FORMAT,
            "scenes": [{"id": "s", "valence": 0.2}, {"id": "s", "valence": 0.4}],
        }
        path = tmp_path / "p.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(DuplicateSceneId):
            io.load_program(path)

    def test_bad_json_and_wrong_header(self, tmp_path):
        path = tmp_path / "p.json"
        path.write_text("{nope")
        with pytest.raises(ParseError):
            io.load_program(path)
        path.write_text(json.dumps({"format": "other/9", "scenes": []}))
        with pytest.raises(ParseError):
            io.load_program(path)


class TestOtherFormats:
    def test_inventory_round_trip(self, tmp_path):
        inventory = make_inventory(0.8, 0.2, 0.55)
        path = tmp_path / "inv.json"
        io.save_inventory(inventory, path)
        assert io.load_inventory(path) == inventory

    def test_schedule_round_trip(self, tmp_path):
        from adplacer.core import Schedule

        schedule = Schedule.strict([(2, "a1"), (1, "a2")])
        path = tmp_path / "schedule.json"
        io.save_schedule(schedule, path)
        again = io.load_schedule(path)
        assert again.in_slot_order == schedule.in_slot_order

    def test_relevance_round_trip(self, tmp_path):
        rng = np.random.default_rng(9)
        from adplacer.core import RelevanceMatrix

        rel = RelevanceMatrix(rng.uniform(-1, 1, (3, 4)))
        path = tmp_path / "rel.txt"
        io.save_relevance(rel, path)
        again = io.load_relevance(path)
        assert np.array_equal(again.values, rel.values)

    def test_features_dir(self, tmp_path):
        rng = np.random.default_rng(12)
        feats = KeyframeFeatures("s1", rng.normal(size=(4, 6)))
        io.save_features(feats, tmp_path / "s1.txt")
        table = io.load_features_dir(tmp_path)
        assert set(table) == {"s1"}
        assert np.array_equal(table["s1"].frames, feats.frames)

    def test_features_dir_empty(self, tmp_path):
        with pytest.raises(ParseError):
            io.load_features_dir(tmp_path)

    def test_profile_round_trip(self, tmp_path):
        from adplacer.core import Schedule
        from adplacer.profile import build_profile

        program, inventory, _, _ = two_ad_instance()
        profile = build_profile(Schedule.strict([(1, "a2"), (2, "a1")]), program, inventory)
        path = tmp_path / "profile.json"
        io.save_profile(profile, path)
        assert io.load_profile(path) == profile


class TestRunCommand:
    def run_cli(self, *args):
        return main([str(a) for a in args])

    def test_brute_force_end_to_end(self, tmp_path, capsys):
        program, inventory, rel = write_two_ad_instance(tmp_path)
        out = tmp_path / "out"
        code = self.run_cli(
            "run", "--program", program, "--inventory", inventory,
            "--rel-file", rel, "--k", 2, "--solver", "brute", "--out", out,
        )
        assert code == 0
        schedule = io.load_schedule(out / "schedule.json")
        assert [(e.slot, e.ad_id) for e in schedule.in_slot_order] == [(1, "a2"), (2, "a1")]
        report = io.load_report(out / "report.json")
        assert report["reward"] == pytest.approx(1.3, abs=1e-9)
        assert report["solver"] == "brute_force"
        profile = io.load_profile(out / "profile.json")
        assert len(profile.points) == 5

    @pytest.mark.parametrize("solver", ["bnb", "lp"])
    def test_other_solvers_agree(self, tmp_path, solver):
        program, inventory, rel = write_two_ad_instance(tmp_path)
        out = tmp_path / f"out-{solver}"
        code = self.run_cli(
            "run", "--program", program, "--inventory", inventory,
            "--rel-file", rel, "--k", 2, "--solver", solver, "--out", out,
        )
        assert code == 0
        report = io.load_report(out / "report.json")
        assert report["reward"] == pytest.approx(1.3, abs=1e-9)

    def test_hundred_scale_flag(self, tmp_path):
        program, inventory, rel = write_two_ad_instance(tmp_path, scale="hundred")
        out = tmp_path / "out"
        code = self.run_cli(
            "run", "--program", program, "--inventory", inventory,
            "--rel-file", rel, "--k", 2, "--scale", "hundred", "--out", out,
        )
        assert code == 0
        report = io.load_report(out / "report.json")
        assert report["reward"] == pytest.approx(1.3, abs=1e-9)

    def test_trivial_is_seed_deterministic(self, tmp_path):
        program, inventory, rel = write_two_ad_instance(tmp_path)
        outs = []
        for name in ("t1", "t2"):
            out = tmp_path / name
            code = self.run_cli(
                "run", "--program", program, "--inventory", inventory,
                "--k", 2, "--solver", "trivial", "--seed", 7, "--out", out,
            )
            assert code == 0
            outs.append((out / "schedule.json").read_bytes())
        assert outs[0] == outs[1]

    def test_odd_k_exits_2_naming_balance(self, tmp_path, capsys):
        program, inventory, rel = write_two_ad_instance(tmp_path)
        code = self.run_cli(
            "run", "--program", program, "--inventory", inventory,
            "--rel-file", rel, "--k", 3, "--out", tmp_path / "out",
        )
        assert code == 2
        assert "balance" in capsys.readouterr().err

    def test_missing_program_exits_1(self, tmp_path):
        _, inventory, rel = write_two_ad_instance(tmp_path)
        code = self.run_cli(
            "run", "--program", tmp_path / "nope.json", "--inventory", inventory,
            "--rel-file", rel, "--k", 2, "--out", tmp_path / "out",
        )
        assert code == 1

    def test_beta_without_relevance_exits_1(self, tmp_path):
        program, inventory, _ = write_two_ad_instance(tmp_path)
        code = self.run_cli(
            "run", "--program", program, "--inventory", inventory,
            "--k", 2, "--out", tmp_path / "out",
        )
        assert code == 1

    def test_alpha_one_needs_no_relevance(self, tmp_path):
        program, inventory, _ = write_two_ad_instance(tmp_path)
        code = self.run_cli(
            "run", "--program", program, "--inventory", inventory,
            "--k", 2, "--alpha", 1.0, "--out", tmp_path / "out",
        )
        assert code == 0

    def test_k_over_slots_exits_2(self, tmp_path):
        program, inventory, rel = write_two_ad_instance(tmp_path)
        code = self.run_cli(
            "run", "--program", program, "--inventory", inventory,
            "--rel-file", rel, "--k", 4, "--out", tmp_path / "out",
        )
        assert code == 2

    def test_cap_overflow_exits_3(self, tmp_path):
        program, inventory, rel = write_two_ad_instance(tmp_path)
        code = self.run_cli(
            "run", "--program", program, "--inventory", inventory,
            "--rel-file", rel, "--k", 2, "--cap", 1, "--out", tmp_path / "out",
        )
        assert code == 3

    def test_features_pipeline(self, tmp_path):
        program, inventory, _ = write_two_ad_instance(tmp_path)
        rng = np.random.default_rng(44)
        feat_dir = tmp_path / "features"
        feat_dir.mkdir()
        for eid in ("s1", "s2", "s3", "a1", "a2"):
            np.savetxt(feat_dir / f"{eid}.txt", rng.normal(size=(5, 8)), fmt="%.17g")
        out = tmp_path / "out"
        code = self.run_cli(
            "run", "--program", program, "--inventory", inventory,
            "--features", feat_dir, "--k", 2, "--out", out,
        )
        assert code == 0
        assert (out / "schedule.json").exists()
        code = self.run_cli(
            "run", "--program", program, "--inventory", inventory,
            "--features", feat_dir, "--pairing", "all_pairs", "--k", 2,
            "--out", tmp_path / "out-allpairs",
        )
        assert code == 0

    def test_missing_feature_entity_exits_1(self, tmp_path):
        program, inventory, _ = write_two_ad_instance(tmp_path)
        rng = np.random.default_rng(45)
        feat_dir = tmp_path / "features"
        feat_dir.mkdir()
        for eid in ("s1", "s2", "s3", "a1"):  # a2 missing
            np.savetxt(feat_dir / f"{eid}.txt", rng.normal(size=(5, 8)), fmt="%.17g")
        code = self.run_cli(
            "run", "--program", program, "--inventory", inventory,
            "--features", feat_dir, "--k", 2, "--out", tmp_path / "out",
        )
        assert code == 1


class TestBenchmark:
    def test_small_grid_agrees(self, capsys):
        rows = benchmark([(6, 4, 2), (8, 5, 2)], seed=0)
        assert len(rows) == 2
        for row in rows:
            assert row["rewards_match"] is True
            assert row["brute_force"]["skipped"] is False

    def test_cap_skips_brute_force_but_not_bnb(self):
        rows = benchmark([(20, 11, 8)], seed=0, cap=1000)
        row = rows[0]
        assert row["brute_force"]["skipped"] is True
        assert row["rewards_match"] is None
        assert "reward" in row["branch_and_bound"]

    def test_cli_empty_grid(self, capsys):
        assert main(["benchmark"]) == 0
        assert json.loads(capsys.readouterr().out) == []

    def test_cli_grid_with_output_file(self, tmp_path, capsys):
        out = tmp_path / "bench.json"
        code = main(["benchmark", "--cell", "6,4,2", "--seed", "1", "--out", str(out)])
        assert code == 0
        stdout_rows = json.loads(capsys.readouterr().out)
        file_rows = json.loads(out.read_text())
        assert stdout_rows == file_rows
        assert file_rows[0]["p"] == 6
