import json
import random

import pytest

import storyweave as sw
from storyweave import files
from helpers import random_instance, random_storyline
from test_core import make_instance


class TestInstanceFiles:
    def test_round_trip(self, tmp_path):
        rng = random.Random(0)
        for k in range(20):
            inst = random_instance(rng)
            path = tmp_path / f"inst{k}.json"
            files.save_instance(path, inst)
            assert files.load_instance(path) == inst

    def test_load_reports_violations(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(
            json.dumps(
                {
                    "characters": ["a"],
                    "timestamps": ["t0"],
                    "interactions": [{"characters": ["z"], "time": "t0"}],
                }
            )
        )
        with pytest.raises(sw.InstanceError, match="unknown character"):
            files.load_instance(path)


class TestStorylineFiles:
    def test_round_trip(self, tmp_path):
        rng = random.Random(1)
        for k in range(20):
            inst = random_instance(rng)
            story = random_storyline(rng, inst)
            path = tmp_path / f"story{k}.json"
            files.save_storyline(path, inst, story)
            assert files.load_storyline(path, inst) == story

    def test_crossings_mismatch_rejected(self, tmp_path):
        inst = make_instance([("ab", "t0"), ("ab", "t1")])
        story, _ = sw.run_pipeline(inst, sw.PipelineConfig())
        doc = files.storyline_to_doc(inst, story)
        doc["crossings"] += 1
        path = tmp_path / "story.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ValueError, match="disagrees with recount"):
            files.load_storyline(path, inst)

    def test_illegal_storyline_rejected(self):
        inst = make_instance([("ab", "t0"), ("ac", "t0")])
        doc = {
            "layers": [
                {
                    "time": "t0",
                    "interactions": [0, 1],
                    "order": ["b", "a", "c"],
                    "active": ["a", "b", "c"],
                }
            ],
            "crossings": 0,
        }
        with pytest.raises(ValueError, match="intersect"):
            files.storyline_from_doc(inst, doc)

    def test_unknown_name_rejected(self):
        inst = make_instance([("ab", "t0")])
        doc = {
            "layers": [
                {
                    "time": "t0",
                    "interactions": [0],
                    "order": ["a", "zz"],
                    "active": ["a", "zz"],
                }
            ]
        }
        with pytest.raises(ValueError, match="malformed layer"):
            files.storyline_from_doc(inst, doc)


class TestBenchRows:
    def test_csv_sorted_with_header(self, tmp_path):
        rows = [
            files.BenchRow("b", "ps", 1, 2, 1, 1, 0, 0.5, "optimal", None),
            files.BenchRow("a", "pp", 1, 2, 1, 1, 0, 0.5, "optimal", None),
            files.BenchRow("a", "ilp1", 1, 2, 1, 1, 0, 0.5, "optimal", None),
        ]
        out = tmp_path / "bench.csv"
        files.write_bench_csv(out, rows)
        lines = out.read_text().strip().splitlines()
        assert lines[0] == ",".join(files.BENCH_COLUMNS)
        firsts = [line.split(",")[:2] for line in lines[1:]]
        assert firsts == [["a", "ilp1"], ["a", "pp"], ["b", "ps"]]

    def test_gap_only_on_timeout(self):
        report = sw.LayoutReport("ilp1", 4, 3, 1.0, "feasible-timeout", 75.0)
        inst = make_instance([("ab", "t0")])
        row = files.BenchRow.from_report("x", inst, report)
        assert row.as_csv()[9] == "75.0"
        report = sw.LayoutReport("ilp1", 4, 3, 1.0, "optimal", None)
        row = files.BenchRow.from_report("x", inst, report)
        assert row.as_csv()[9] == ""
