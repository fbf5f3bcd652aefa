from __future__ import annotations

import json
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sted import tables
from sted.errors import (
    EmptyPool,
    InfeasibleSpec,
    InputError,
    NoEligibleKeys,
    NoEligibleValues,
    OverlappingGroups,
    UnknownKey,
)
from sted.tree import ARRAY, OBJECT, dump_document, iter_nodes, tree_from_value, tree_stats
from sted.variation import (
    DEFAULT_TYPE_MIX,
    RATIO_LEVELS,
    BaseDocSpec,
    VariationSpec,
    apply_expression_variation,
    apply_field_rename,
    apply_semantic_variation,
    apply_variation,
    default_grouping,
    derive_seed,
    flatten_structure,
    gen_base_document,
    nest_structure,
    round_half_up,
    sample_base_specs,
    sites_to_modify,
    _rename_sites,
    type_shares,
)


def doc(v):
    return tree_from_value(v)


def keys_only(node):
    """Structure projection: types and keys, no values."""
    if node.children is None:
        return node.node_type
    if node.node_type == OBJECT:
        return (OBJECT, tuple((c.label, keys_only(c)) for c in node.children))
    return (ARRAY, tuple(keys_only(c) for c in node.children))


def values_only(node):
    """Content projection: the leaf sequence in document order."""
    return [(n.node_type, n.digest) for n in iter_nodes(node) if n.children is None]


def leaf_multiset(tree):
    return Counter((n.node_type, n.digest) for n in iter_nodes(tree) if n.children is None)


def test_round_half_up():
    assert [round_half_up(x) for x in (0.5, 1.5, 2.5, 0.49, 3.0)] == [1, 2, 3, 0, 3]


def test_sites_are_nested_across_ratios():
    prev: set[int] = set()
    for r in RATIO_LEVELS:
        cur = set(sites_to_modify(r, 37, 9))
        assert len(cur) == round_half_up(r * 37)
        assert prev <= cur
        prev = cur
    assert sites_to_modify(0.0, 10, 1) == []


def test_derive_seed_stable():
    assert derive_seed(1, "nest") == derive_seed(1, "nest")
    assert derive_seed(1, "nest") != derive_seed(2, "nest")
    assert 0 <= derive_seed("x") < 2**63


def test_base_doc_examples():
    a = gen_base_document(BaseDocSpec(2, 4, seed=7))
    b = gen_base_document(BaseDocSpec(2, 4, seed=7))
    assert dump_document(a) == dump_document(b)
    assert tree_stats(gen_base_document(BaseDocSpec(4, 42, seed=1)))["max_depth"] == 4


def test_infeasible_specs():
    with pytest.raises(InfeasibleSpec):
        BaseDocSpec(7, 4)
    with pytest.raises(InfeasibleSpec):
        BaseDocSpec(8, 50)
    with pytest.raises(InfeasibleSpec):
        BaseDocSpec(3, 300)
    with pytest.raises(InfeasibleSpec):
        BaseDocSpec(3, 30, {"string": 0.5, "integer": 0.4, "array": 0.05, "object": 0.04})


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 7), st.integers(4, 228), st.integers(0, 2**32))
def test_generated_bounds(depth, fields, seed):
    if fields < depth + 2:
        fields = depth + 2
    d = gen_base_document(BaseDocSpec(depth, fields, seed=seed))
    s = tree_stats(d)
    # member-depth: the root counts as level 1 and leaves under the deepest object as level depth
    assert s["max_depth"] == depth
    assert abs(s["field_count"] - fields) <= 0.1 * fields


def test_batch_type_shares(corpus75):
    _, docs = corpus75
    shares = type_shares(docs)
    for kind, target in DEFAULT_TYPE_MIX.items():
        assert abs(shares.get(kind, 0.0) - target) <= 0.05, (kind, shares)


def test_sample_specs_reproduce_bins():
    specs = sample_base_specs(75, 3)
    assert Counter(s.target_depth for s in specs) == Counter({4: 44, 5: 13, 2: 8, 3: 7, 6: 2, 7: 1})
    assert specs == sample_base_specs(75, 3)


def test_field_rename_examples():
    d = doc({"user_name": "ann", "id": 1})
    assert dump_document(apply_field_rename(d, 0.0)) == dump_document(d)
    out = apply_field_rename(d, 1.0, {"user_name": "userName"})
    assert [c.label for c in out.root.children] == ["userName", "id"]
    ten = doc({f"k{i}": i for i in range(10)})
    table = {f"k{i}": f"key{i}" for i in range(10)}
    renamed = apply_field_rename(ten, 0.5, table, seed=4)
    assert sum(c.label.startswith("key") for c in renamed.root.children) == 5
    with pytest.raises(NoEligibleKeys):
        apply_field_rename(doc({"zzz": 1}), 0.5, {"user_name": "userName"})


def test_rename_never_collides_with_sibling():
    with pytest.raises(NoEligibleKeys):
        apply_field_rename(doc({"qty": 1, "quantity": 2}), 1.0, {"qty": "quantity"})


def test_expression_examples():
    d = doc({"goal": "purchase a car", "n": 3})
    table = {"purchase a car": "buy an automobile"}
    assert to_json(apply_expression_variation(d, 1.0, table)) == {"goal": "buy an automobile", "n": 3}
    assert dump_document(apply_expression_variation(d, 0.0, table)) == dump_document(d)
    with pytest.raises(NoEligibleValues):
        apply_expression_variation(doc({"n": 3}), 0.5, table)


def to_json(tree):
    return json.loads(dump_document(tree))


def test_semantic_examples():
    d = doc({"a": "alpha", "b": ["beta", "gamma"], "c": {"d": "delta"}, "n": 4, "t": True})
    out = apply_semantic_variation(d, 1.0, seed=2)
    before = [n for n in iter_nodes(d) if n.children is None]
    after = [n for n in iter_nodes(out) if n.children is None]
    for x, y in zip(before, after):
        assert x.node_type == y.node_type
        assert x.digest != y.digest
    assert dump_document(apply_semantic_variation(d, 0.0)) == dump_document(d)
    with pytest.raises(EmptyPool):
        apply_semantic_variation(d, 0.5, [])
    with pytest.raises(NoEligibleValues):
        apply_semantic_variation(doc({"x": None}), 0.5)


def test_flatten_examples():
    assert to_json(flatten_structure(doc({"user": {"name": "John", "age": 30}}))) == {"user_name": "John", "user_age": 30}
    assert to_json(flatten_structure(doc({"a": {"b": {"c": 1}}}))) == {"a_b_c": 1}
    flat = doc({"x": 1, "y": [1, {"z": 2}]})
    assert dump_document(flatten_structure(flat)) == dump_document(flat)


def test_flatten_collision_gets_suffix_and_warning():
    out = flatten_structure(doc({"a_b": 1, "a": {"b": 2}}))
    assert to_json(out) == {"a_b": 1, "a_b_2": 2}
    assert any("collision" in w for w in out.warnings)


def test_nest_examples():
    d = doc({"street": "Main", "city": "NYC"})
    assert to_json(nest_structure(d, {"address": ["street", "city"]})) == {"address": {"street": "Main", "city": "NYC"}}
    assert dump_document(nest_structure(d, {})) == dump_document(d)
    part = nest_structure(doc({"street": "Main", "city": "NYC", "id": 1}), {"address": ["street", "city"]})
    assert to_json(part) == {"address": {"street": "Main", "city": "NYC"}, "id": 1}
    with pytest.raises(UnknownKey):
        nest_structure(d, {"address": ["zip"]})
    with pytest.raises(OverlappingGroups):
        nest_structure(d, {"g1": ["street"], "g2": ["street"]})
    with pytest.raises(InputError):
        nest_structure(d, {"city": ["street"]})
    with pytest.raises(InputError):
        flatten_structure(doc([1, 2]))


def test_default_grouping_partitions_root():
    d = doc({f"k{i}": i for i in range(7)})
    g = default_grouping(d, seed=1)
    members = [k for ks in g.values() for k in ks]
    assert sorted(members) == sorted(f"k{i}" for i in range(7))
    assert all(2 <= len(ks) <= 3 for ks in g.values())


def test_variation_spec_validation():
    with pytest.raises(InputError):
        VariationSpec("shuffle", 0.5)
    with pytest.raises(InputError):
        VariationSpec("semantic", 0.25)
    VariationSpec("nest")


def test_default_tables_size():
    assert len(tables.SYNONYMS) >= 150 and len(tables.PARAPHRASES) >= 150
    assert tables.SYNONYMS["user_name"] == "userName"


CASES = [(kind, r) for kind in ("field-rename", "expression", "semantic") for r in (0.1, 0.5, 1.0)]


def test_properties_over_corpus(corpus75):
    specs, docs = corpus75
    for spec, base in list(zip(specs, docs))[:30]:
        for kind, r in CASES:
            vs = VariationSpec(kind, r, spec.seed)
            out = apply_variation(base, vs)
            # determinism
            assert dump_document(out) == dump_document(apply_variation(base, vs))
            if kind == "field-rename":
                # only keys change, and exactly the expected number of them
                assert values_only(out.root) == values_only(base.root)
                changed = sum(
                    a.label != b.label for a, b in zip(iter_nodes(base), iter_nodes(out))
                )
                eligible = len(_rename_sites(json.loads(dump_document(base)), tables.SYNONYMS))
                assert changed == round_half_up(r * eligible)
            else:
                assert keys_only(out.root) == keys_only(base.root)
                changed = sum(x != y for x, y in zip(values_only(base.root), values_only(out.root)))
                if kind == "expression":
                    eligible = sum(
                        n.node_type == "string" and n.value in tables.PARAPHRASES for n in iter_nodes(base)
                    )
                else:
                    # every primitive leaf has a same-type draw in the default pool
                    eligible = sum(n.children is None and n.node_type != "null" for n in iter_nodes(base))
                assert changed == round_half_up(r * eligible)
        for kind in ("flatten", "nest"):
            out = apply_variation(base, VariationSpec(kind, None, spec.seed))
            assert leaf_multiset(out) == leaf_multiset(base)
