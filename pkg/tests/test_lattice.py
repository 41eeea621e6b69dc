import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infocontrib.errors import LatticeError, ParseError
from infocontrib.lattice import (
    ConstraintNode,
    complex_faces,
    complex_from_facets,
    count_linear_extensions,
    default_input_names,
    enumerate_lattice,
    facets_of,
    format_complex,
    format_face,
    format_node,
    is_simplicial_complex,
    facet_order_leq,
    parse_complex,
    parse_node,
    sigma,
)

X1, X2, X3 = 0b001, 0b010, 0b100


def brute_complexes(n):
    """All down-closed families of subsets of {0..n-1} that contain the empty face."""
    faces = range(1 << n)
    out = []
    for bits in range(1 << (1 << n)):
        if not bits & 1:
            continue
        members = [f for f in faces if bits >> f & 1]
        if all(bits >> g & 1 for f in members for g in faces if g & ~f == 0):
            out.append(bits)
    return out


def brute_chain_count(nodes):
    """Count maximal chains by recursion on 'add one face' covers."""
    node_set = set(nodes)
    top = max(nodes)

    def count(s):
        if s == top:
            return 1
        return sum(count(s | 1 << f) for f in range(top.bit_length()) if not s >> f & 1 and s | 1 << f in node_set)

    return count(1)


def brute_extensions(players, before=()):
    players = list(players)
    n = 0
    for perm in itertools.permutations(players):
        pos = {f: i for i, f in enumerate(perm)}
        if all(pos[a] < pos[b] for a in players for b in players if a != b and a & ~b == 0):
            if all(pos[a] < pos[b] for a, b in before):
                n += 1
    return n


class TestEnumeration:
    @pytest.mark.parametrize("n, nodes, edges", [(1, 2, 1), (2, 5, 5), (3, 19, 31), (4, 167, 453)])
    def test_sizes(self, n, nodes, edges):
        lat = enumerate_lattice(n)
        assert len(lat.nodes) == nodes
        assert len(lat.edges) == edges

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_nodes_match_brute_force(self, n):
        assert sorted(enumerate_lattice(n).nodes) == brute_complexes(n)

    @pytest.mark.parametrize("n, chains", [(1, 1), (2, 2), (3, 48)])
    def test_maximal_chain_count(self, n, chains):
        lat = enumerate_lattice(n)
        assert lat.total_chains == chains
        assert brute_chain_count(lat.nodes) == chains
        assert sum(1 for _ in lat.maximal_chains()) == chains

    def test_n4_chain_count(self):
        assert enumerate_lattice(4).total_chains == 1680384

    def test_two_input_nodes(self):
        lat = enumerate_lattice(2)
        names = default_input_names(2)
        assert [format_complex(s, names) for s in lat.nodes] == ["[]", "[X1]", "[X2]", "[X1][X2]", "[X1X2]"]
        assert lat.bottom == 1
        assert lat.top == 0b1111

    def test_cap(self):
        with pytest.raises(LatticeError):
            enumerate_lattice(4, cap=3)
        with pytest.raises(LatticeError):
            enumerate_lattice(0)

    @pytest.mark.parametrize("n", [2, 3])
    def test_order_is_inclusion(self, n):
        lat = enumerate_lattice(n)
        for s, t in itertools.product(lat.nodes, repeat=2):
            assert facet_order_leq(s, t) == (s & ~t == 0)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_edges_are_covers(self, n):
        lat = enumerate_lattice(n)
        for e in lat.edges:
            assert e.upper == e.lower | 1 << e.face
            assert not e.lower >> e.face & 1
            # all proper subfaces of the added face are already present
            assert all(e.lower >> g & 1 for g in range(1 << n) if g != e.face and g & ~e.face == 0)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_chain_count_conservation(self, n):
        lat = enumerate_lattice(n)
        for s in lat.nodes:
            if s != lat.top:
                assert lat.chains_to_top[s] == sum(lat.chains_to_top[t] for t in lat.upper_covers(s))
            if s != lat.bottom:
                assert lat.chains_from_bottom[s] == sum(lat.chains_from_bottom[t] for t in lat.lower_covers(s))

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_each_chain_adds_each_face_once(self, n):
        lat = enumerate_lattice(n)
        for a in lat.faces:
            assert sum(lat.edge_weight(e) for e in lat.edges_adding(a)) == Fraction(1)
            assert sum(lat.chains_through(e) for e in lat.edges_adding(a)) == lat.total_chains

    def test_edge_weights_two_inputs(self):
        lat = enumerate_lattice(2)
        assert [lat.edge_weight(e) for e in lat.edges_adding(X1)] == [Fraction(1, 2), Fraction(1, 2)]
        (joint,) = lat.edges_adding(X1 | X2)
        assert joint.lower == 0b0111 and lat.edge_weight(joint) == 1

    def test_joint_face_edges_three_inputs(self):
        lat = enumerate_lattice(3)
        edges = lat.edges_adding(X1 | X2)
        assert all(e.lower >> X1 & 1 and e.lower >> X2 & 1 for e in edges)
        # below: [X1][X2], [X1][X2][X3] and the three ways to add {X1,X3} / {X2,X3}
        assert len(edges) == 5
        assert sum(lat.chains_through(e) for e in edges) == 48

    def test_is_chain(self):
        lat = enumerate_lattice(2)
        assert lat.is_chain([1, 0b0011, 0b0111, 0b1111])
        assert lat.is_chain([1, 0b1111])
        assert not lat.is_chain([0b0011, 0b0101])
        assert not lat.is_chain([0b1111, 1])


class TestComplexes:
    def test_helpers(self):
        bits = complex_from_facets([X1 | X2, X3], 3)
        assert complex_faces(bits) == [0, X1, X2, X1 | X2, X3]
        assert facets_of(bits) == [X1 | X2, X3]
        assert is_simplicial_complex(bits, 3)
        assert not is_simplicial_complex(1 | 1 << (X1 | X2), 2)
        assert not is_simplicial_complex(0, 2)

    def test_constraint_node_validation(self):
        with pytest.raises(LatticeError):
            ConstraintNode(3, (0b011,))  # does not cover Z3
        with pytest.raises(LatticeError):
            ConstraintNode(3, (0b011, 0b001, 0b100))
        with pytest.raises(LatticeError):
            ConstraintNode(2, (0b10, 0b01))
        node = ConstraintNode.from_faces([0b001, 0b011, 0b110], 3)
        assert node.facets == (0b011, 0b110)
        assert node.contains(0b010) and not node.contains(0b101)

    def test_sigma_examples(self):
        names = ["X1", "X2", "Y"]
        assert format_node(sigma(1, 2), names) == "(X1X2)(Y)"
        assert format_node(sigma(0b0011, 2), names) == "(X1X2)(X1Y)"
        assert format_node(sigma(0b0111, 2), names) == "(X1X2)(X1Y)(X2Y)"
        assert format_node(sigma(0b1111, 2), names) == "(X1X2Y)"

    def test_sigma_custom_positions(self):
        node = sigma(0b0011, 2, inputs=(1, 2), target=0, nvars=3)
        assert node.facets == (0b011, 0b110)
        with pytest.raises(LatticeError):
            sigma(0b0011, 2, inputs=(0, 1), target=1, nvars=3)
        with pytest.raises(LatticeError):
            sigma(0b0010, 2)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_sigma_injective_and_monotone(self, n):
        lat = enumerate_lattice(n)
        images = {s: sigma(s, n) for s in lat.nodes}
        assert len(set(images.values())) == len(images)
        for s, t in itertools.product(lat.nodes, repeat=2):
            assert (s & ~t == 0) == (images[s] <= images[t])


class TestLinearExtensions:
    def test_examples(self):
        assert count_linear_extensions([]) == 1
        assert count_linear_extensions([0, X1, X2]) == 2
        assert count_linear_extensions([X1, X2, X1 | X2]) == 2
        assert count_linear_extensions([0, X1, X2, X1 | X2]) == 2

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_full_power_set_equals_chain_count(self, n):
        assert count_linear_extensions(range(1 << n)) == enumerate_lattice(n).total_chains

    def test_before_constraint(self):
        assert count_linear_extensions([0, X1, X2, X1 | X2], before=[(X2, X1)]) == 1
        with pytest.raises(LatticeError):
            count_linear_extensions([X1], before=[(X2, X1)])

    @settings(max_examples=60, deadline=None)
    @given(st.sets(st.integers(0, 7), max_size=7), st.data())
    def test_against_permutations(self, players, data):
        players = sorted(players)
        before = []
        if len(players) >= 2:
            a, b = data.draw(st.permutations(players))[:2]
            if not b & ~a == 0:  # a constraint that does not contradict inclusion
                before = [(a, b)]
        assert count_linear_extensions(players, before=before) == brute_extensions(players, before)


class TestNotation:
    def test_format(self):
        names = default_input_names(3)
        assert format_face(X1 | X3, names) == "{X1,X3}"
        assert format_complex(0, names) == "∅"
        assert format_complex(1, names) == "[]"
        assert format_complex(complex_from_facets([X1 | X2, X3], 3), names) == "[X1X2][X3]"

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_complex_round_trip(self, n):
        names = default_input_names(n)
        for s in enumerate_lattice(n).nodes:
            assert parse_complex(format_complex(s, names), names) == s

    def test_parse_variants(self):
        names = ["X1", "X2", "X10"]
        assert parse_complex("[X1,X10] [X2]", names) == parse_complex("[X1X10][X2]", names)
        assert parse_complex("{}", names) == 1
        node = parse_node("(Z1Z3)(Z2Z3)", ["Z1", "Z2", "Z3"])
        assert node.facets == (0b101, 0b110)
        assert parse_node("(A B)(C)", ["A", "B", "C"]).facets == (0b011, 0b100)

    @pytest.mark.parametrize("text", ["", "X1", "[X1]junk", "[Q]", "(X1"])
    def test_parse_errors(self, text):
        with pytest.raises(ParseError):
            parse_complex(text, ["X1", "X2"])
