import pytest

from semimatch.bucket import BucketConfig, BucketState, stream_bucket_run
from semimatch.certificate import build_certificate, filter_to_final_window
from semimatch.core import Edge, Matching, StreamSource
from semimatch.generators import (
    RandomInstanceConfig,
    TightExampleConfig,
    UniformWeights,
    random_instance,
    tight_instance,
)
from semimatch.oracle import max_weight_matching_exact

REL = 1e-9


def chain_assert(cert):
    g = cert.gamma
    slack = 1 + REL
    assert cert.opt_rounded <= cert.opt_weight * slack
    assert cert.opt_weight <= g * cert.opt_rounded * slack
    assert cert.opt_rounded <= cert.total_associated_weight * slack
    assert cert.total_associated_weight <= (2 * g / (g - 1)) * cert.alg_weight * slack
    assert cert.chain_holds()


def build_for(stream, gamma, epsilon, delta=0.0):
    state = stream_bucket_run(stream, BucketConfig(
        gamma=gamma, epsilon=epsilon, num_vertices=stream.num_vertices, delta=delta))
    survivors = filter_to_final_window(state, stream.edges)
    opt, _ = max_weight_matching_exact(survivors)
    return state, build_certificate(state, opt)


class TestSingleClass:
    def test_one_edge(self):
        stream = StreamSource(2, [Edge(0, 1, 1.5)])
        state, cert = build_for(stream, 2.0, 0.1)
        # one class-0 edge: both endpoints associated at weight phi*gamma^0 = 1
        assert cert.per_vertex_association == {0: (0, 1.0), 1: (0, 1.0)}
        assert cert.total_associated_weight == 2.0
        assert cert.opt_rounded == 1.0
        chain_assert(cert)


class TestTightInstance:
    def test_chain_and_tightness(self):
        config = TightExampleConfig(gamma=2.0, k=2, eps=1e-6)
        stream = tight_instance(config)
        state, cert = build_for(stream, 2.0, 0.01)
        chain_assert(cert)
        # rounded optimum equals the associated weight exactly on this family
        assert cert.opt_rounded == cert.total_associated_weight == 14.0
        # the rounding inequality is epsilon-tight here
        assert cert.gamma * cert.opt_rounded - cert.opt_weight == pytest.approx(
            6e-6, rel=1e-6)


class TestVertexAssociation:
    def test_highest_class_claims_vertex(self):
        # vertex 0 appears in the class-3 and class-1 matchings: associated with 3
        edges = [Edge(0, 1, 2.0), Edge(0, 2, 9.0)]
        state = BucketState(BucketConfig(gamma=2.0, epsilon=0.01, num_vertices=8))
        for e in edges:
            state.process(e)
        assert sorted(state.matchings) == [1, 3]
        opt, _ = max_weight_matching_exact(filter_to_final_window(state, edges))
        cert = build_certificate(state, opt)
        assert cert.per_vertex_association[0] == (3, 8.0)
        assert cert.per_vertex_association[1] == (1, 2.0)
        assert cert.per_vertex_association[2] == (3, 8.0)

    def test_association_sets_disjoint(self):
        stream = random_instance(RandomInstanceConfig(
            n=12, m=30, weight_law=UniformWeights(1, 500), seed=8))
        state, cert = build_for(stream, 2.0, 0.1)
        # dict keys are unique by construction; check weights match class floors
        for vertex, (i, w) in cert.per_vertex_association.items():
            assert w == pytest.approx(state.config.phi * 2.0 ** i, rel=1e-12)


class TestErrors:
    def test_oracle_edge_below_final_threshold_rejected(self):
        state = BucketState(BucketConfig(gamma=2.0, epsilon=1.0, num_vertices=4))
        state.process(Edge(0, 1, 1.0))
        state.process(Edge(2, 3, 4096.0))  # threshold 2048, window clamps high
        dead = Matching.from_edges([Edge(0, 1, 1.0)])
        with pytest.raises(ValueError, match="below the final discard threshold"):
            build_certificate(state, dead)


class TestChainOnRandomInstances:
    @pytest.mark.parametrize("gamma,delta", [(2.0, 0.0), (3.513, 0.0), (2.0, 0.3), (3.513, 0.7)])
    def test_chain(self, gamma, delta):
        for seed in range(12):
            stream = random_instance(RandomInstanceConfig(
                n=12, m=30, weight_law=UniformWeights(0.5, 800), seed=seed))
            _state, cert = build_for(stream, gamma, 0.05, delta)
            chain_assert(cert)
