import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from batchline.ruledsl import (
    ClassAtom,
    Compare,
    NumberLit,
    PropertyAtom,
    RelDiff,
    RuleAst,
    RuleSyntaxError,
    StringLit,
    Var,
    parse_rule,
    parse_ruleset,
    print_rule,
    validate_rule,
)

MATCH_RULE = (
    "match(s1,s2) := Sample(s1) AND Sample(s2) AND drugType(s1,dt1) "
    "AND drugType(s2,dt2) AND dt1 == dt2 AND s1 != s2"
)

SIBLING_RULE = (
    "siblings(p2,p3) := Person(p1) AND Person(p2) AND Person(p3) "
    "AND isFatherOf(p1,p2) AND isFatherOf(p1,p3) AND p2 != p3"
)


def test_parse_match_rule_shape():
    ast = parse_rule(MATCH_RULE)
    assert ast.name == "match"
    assert ast.head_vars == ("s1", "s2")
    assert sum(isinstance(a, ClassAtom) for a in ast.body) == 2
    assert sum(isinstance(a, PropertyAtom) for a in ast.body) == 2
    assert sum(isinstance(a, Compare) for a in ast.body) == 2


def test_parse_sibling_rule():
    ast = parse_rule(SIBLING_RULE)
    assert ast.head_vars == ("p2", "p3")
    assert PropertyAtom("isFatherOf", "p1", "p2") in ast.body


def test_safety_violation_names_unbound_vars():
    with pytest.raises(RuleSyntaxError) as exc:
        parse_rule("bad(x,y) := Sample(x) AND z == 5")
    assert exc.value.code == "safety-violation"
    assert "z" in str(exc.value)
    assert "y" in str(exc.value)


def test_lexical_error_position():
    with pytest.raises(RuleSyntaxError) as exc:
        parse_rule("match(s1,s2) := Sample(s1) € 5")
    assert exc.value.code == "lexical-error"
    assert exc.value.span.line == 1


def test_syntax_error_expected_set():
    with pytest.raises(RuleSyntaxError) as exc:
        parse_rule("match(s1 s2) := Sample(s1)")
    assert exc.value.code == "syntax-error"
    assert exc.value.expected


def test_reldiff_tolerance_bounds():
    parse_rule("r(a,b) := width(a,x) AND width(b,y) AND reldiff(x,y,0.05)")
    with pytest.raises(RuleSyntaxError):
        parse_rule("r(a,b) := width(a,x) AND width(b,y) AND reldiff(x,y,1.5)")


def test_ruleset_duplicate_names_rejected():
    with pytest.raises(RuleSyntaxError):
        parse_ruleset("a(x) := Sample(x); a(x) := Sample(x);")


def test_comments_and_multiline():
    text = "# heading\nr1(x) := Sample(x); # trailing\nr2(x) := Sealed(x);\n"
    rules = parse_ruleset(text)
    assert [r.name for r in rules] == ["r1", "r2"]


def test_round_trip_match_rule():
    ast = parse_rule(MATCH_RULE)
    assert parse_rule(print_rule(ast)) == ast


def test_canonical_spacing_collapses():
    spaced = "match(s1,  s2)   :=  Sample(s1)  AND  Sample(s2)"
    canonical = print_rule(parse_rule(spaced))
    assert "  " not in canonical
    assert print_rule(parse_rule(canonical)) == canonical


# ------------------------------------------------- randomized round trip


def _random_ast(rng: random.Random) -> RuleAst:
    n_vars = rng.randint(2, 5)
    vs = [f"v{i}" for i in range(n_vars)]
    body = []
    bound = set()
    for v in vs:
        if rng.random() < 0.7:
            body.append(ClassAtom(rng.choice(["Sample", "Sealed", "Person"]), v))
            bound.add(v)
    for _ in range(rng.randint(1, 4)):
        a, b = rng.choice(vs), rng.choice(vs)
        body.append(PropertyAtom(rng.choice(["comesFrom", "width", "drugType"]), a, b))
        bound.update((a, b))
    head = tuple(rng.sample(sorted(bound), min(2, len(bound))))
    for _ in range(rng.randint(0, 3)):
        kind = rng.random()
        if kind < 0.4:
            body.append(
                Compare(
                    Var(rng.choice(sorted(bound))),
                    rng.choice(["==", "!=", "<", "<=", ">", ">="]),
                    NumberLit(float(rng.randint(0, 50))),
                )
            )
        elif kind < 0.7:
            body.append(Compare(Var(rng.choice(sorted(bound))), "==", StringLit("cannabis")))
        else:
            body.append(
                RelDiff(rng.choice(sorted(bound)), rng.choice(sorted(bound)), round(rng.uniform(0.01, 0.9), 3))
            )
    return RuleAst("gen", head, tuple(body))


def test_round_trip_randomized_asts():
    for seed in range(200):
        ast = _random_ast(random.Random(seed))
        text = print_rule(ast)
        again = parse_rule(text)
        assert again == ast, f"seed {seed}: {text}"


@given(st.binary(max_size=80))
@settings(max_examples=300)
def test_parser_total_on_arbitrary_bytes(data):
    try:
        parse_rule(data.decode("utf-8", errors="replace"))
    except RuleSyntaxError:
        pass  # rejection is fine; crashing is not


# ------------------------------------------------------------ validation


def test_match_rule_validates_against_shipped(drug_schema):
    ast = parse_rule(MATCH_RULE)
    assert validate_rule(ast, drug_schema) == []


def test_unknown_predicate_suggests_tbox_revision(drug_schema):
    ast = parse_rule("r(s1,s2) := Sample(s1) AND Sample(s2) AND flavour(s1,c1) AND flavour(s2,c2) AND c1 == c2")
    diags = validate_rule(ast, drug_schema)
    assert any(d.code == "unknown-predicate" and "revise the TBox" in d.message for d in diags)


def test_reldiff_over_string_property(drug_schema):
    ast = parse_rule(
        "r(s1,s2) := Sample(s1) AND Sample(s2) AND drugType(s1,a) AND drugType(s2,b) AND reldiff(a,b,0.05)"
    )
    diags = validate_rule(ast, drug_schema)
    assert any(d.code == "datatype-mismatch" for d in diags)


def test_validated_rule_references_only_schema_names(drug_schema, shipped_rules):
    for rule in shipped_rules:
        assert validate_rule(rule, drug_schema) == []
        for atom in rule.body:
            if isinstance(atom, ClassAtom):
                assert drug_schema.lookup(atom.class_name)[0] == "class"
            elif isinstance(atom, PropertyAtom):
                assert drug_schema.lookup(atom.property)[0] != "unknown"
