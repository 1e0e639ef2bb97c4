import io

import numpy as np
import pytest

from multinode.graph import build_graph, ego_network
from multinode.ingest import write_events
from multinode.mcl import Clustering
from multinode.scoring import activity_profiles
from multinode.synth import MOBILE, MULTI, SynthConfig, generate, generate_benchmark, mobility_pair
from oracles import components


def serialize(events):
    buf = io.StringIO()
    write_events(events, buf, "jsonl")
    return buf.getvalue()


class TestConstruction:
    @pytest.mark.parametrize("seed", range(5))
    def test_multi_without_noise_has_two_components(self, seed):
        cfg = SynthConfig(n_pure=0, n_multi=1, n_mobile=0, inter_noise=0.0, seed=seed)
        bench = generate_benchmark(cfg)
        (ego,) = bench.kinds
        net = ego_network(build_graph(bench.events), ego)
        comps = components(set(net.neighbors), net.alter_edges())
        assert len(comps) == 2
        assert sorted(map(sorted, comps)) == sorted(map(sorted, bench.communities[ego]))

    def test_same_seed_is_byte_identical(self):
        a, _ = generate(SynthConfig(n_pure=3, n_multi=3, n_mobile=3, seed=7))
        b, _ = generate(SynthConfig(n_pure=3, n_multi=3, n_mobile=3, seed=7))
        c, _ = generate(SynthConfig(n_pure=3, n_multi=3, n_mobile=3, seed=8))
        assert serialize(a) == serialize(b)
        assert serialize(a) != serialize(c)

    def test_default_label_counts(self):
        _, labels = generate(SynthConfig())
        assert len(labels) == 75
        assert sum(r.label for r in labels) == 25

    def test_labels_follow_kind(self):
        bench = generate_benchmark(SynthConfig(n_pure=4, n_multi=4, n_mobile=4, seed=2))
        for rec in bench.labels:
            assert rec.label == int(bench.kinds[rec.node_id] == MULTI)

    def test_times_within_span(self):
        cfg = SynthConfig(n_pure=2, n_multi=2, n_mobile=2, years=6, start_year=1990, seed=1)
        events, _ = generate(cfg)
        times = [e.time for e in events]
        assert min(times) >= 1990 and max(times) <= 1995

    def test_every_member_linked_to_ego(self):
        bench = generate_benchmark(SynthConfig(n_pure=3, n_multi=3, n_mobile=3, seed=4))
        g = build_graph(bench.events)
        for ego, comms in bench.communities.items():
            assert g.neighbors(ego) == {m for c in comms for m in c}

    @pytest.mark.parametrize("kw", [
        {"n_pure": -1}, {"entities_per_multi": 1}, {"intra_density": 0.0}, {"inter_noise": 1.0},
        {"years": 1}, {"mobility_break": 0}, {"mobility_break": 10}, {"events_per_year": 0},
    ])
    def test_invalid_config(self, kw):
        with pytest.raises(ValueError):
            SynthConfig(**kw)


class TestMobility:
    def test_eras_are_disjoint(self):
        bench = generate_benchmark(SynthConfig(n_pure=0, n_multi=0, n_mobile=3, seed=6))
        g = build_graph(bench.events)
        for ego, comms in bench.communities.items():
            assert bench.kinds[ego] == MOBILE
            profiles = activity_profiles(g, ego, Clustering(tuple(tuple(sorted(c)) for c in comms)))
            a, b = (p.raw > 0 for p in profiles)
            assert not np.any(a & b)

    def test_twin_is_relabeled_copy(self):
        events, mobile, twin = mobility_pair(3)
        g = build_graph(events)
        assert len(g.neighbors(mobile)) == len(g.neighbors(twin))
        orig = [e for e in events if not e.event_id.startswith("t")]
        copy = [e for e in events if e.event_id.startswith("t")]
        assert [tuple("t" + p for p in e.participants) for e in orig] == [e.participants for e in copy]
