"""Seeded synthetic data generator emulating the production database scale.

Real seizure data is confidential; this generator produces a
schema-conformant ABox of configurable size (default ~70,000 instances,
20,000 of them samples) for scale and soak testing.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .terms import RDF_TYPE, Graph, Term, Triple

DRUG_TYPES = ("cannabis", "cocaine", "miscellaneous", "amphetamine and derivatives")
CHEMICAL_FORMS = ("resin", "powder", "tablet", "herb", "crystal", "paste", "oil", "block")
CITIES = ("dijon", "lyon", "paris", "marseille", "lille", "nantes", "bordeaux", "toulouse")


@dataclass
class SynthConfig:
    seed: int = 42
    samples: int = 20_000
    sealed: int = 15_000
    seizures: int = 5_000
    aspects: int = 10_000
    active_principles: int = 8_000
    cutting_products: int = 6_000
    profiles: int = 6_000
    close_pairs: int = 500  # asserted isCloseTo links, feed the symmetric rule

    @property
    def total_instances(self) -> int:
        return (
            self.samples
            + self.sealed
            + self.seizures
            + self.aspects
            + self.active_principles
            + self.cutting_products
            + self.profiles
        )


def _entity(cls: str, n: int) -> Term:
    return Term.entity(f"stups:{cls.lower()}/{n}")


def generate(config: SynthConfig) -> Graph:
    """Deterministic graph for the given seed; conforms to the drug-domain schema."""
    rng = random.Random(config.seed)
    g = Graph()

    def typed(term: Term, cls: str) -> None:
        g.insert(Triple(term, RDF_TYPE, Term.entity(cls)))

    def dp(subject: Term, prop: str, lexical: str, datatype: str) -> None:
        g.insert(Triple(subject, Term.entity(prop), Term.literal(lexical, datatype)))

    def op(subject: Term, prop: str, obj: Term) -> None:
        g.insert(Triple(subject, Term.entity(prop), obj))

    seizures = [_entity("Seizure", i) for i in range(config.seizures)]
    for i, s in enumerate(seizures):
        typed(s, "Seizure")
        dp(s, "seizureNumber", f"SZ-{i:06d}", "string")
        dp(s, "seizureDate", f"20{20 + i % 5}-{1 + i % 12:02d}-{1 + i % 28:02d}", "date")

    sealed = [_entity("Sealed", i) for i in range(config.sealed)]
    for i, s in enumerate(sealed):
        typed(s, "Sealed")
        dp(s, "sealedNumber", f"SL-{i:06d}", "string")
        op(seizures[i % config.seizures], "hasSealed", s)

    aspects = [_entity("Aspect", i) for i in range(config.aspects)]
    for i, a in enumerate(aspects):
        typed(a, "Aspect")
        dp(a, "colour", rng.choice(("brown", "white", "green", "beige", "pink")), "string")

    principles = [_entity("ActivePrinciple", i) for i in range(config.active_principles)]
    for i, p in enumerate(principles):
        typed(p, "ActivePrinciple")
        dp(p, "principleName", rng.choice(("thc", "cocaine", "mdma", "amphetamine", "cbd")), "string")
        dp(p, "purity", f"{rng.uniform(5, 95):.1f}", "float")

    cuttings = [_entity("CuttingProduct", i) for i in range(config.cutting_products)]
    for i, c in enumerate(cuttings):
        typed(c, "CuttingProduct")
        dp(c, "productName", rng.choice(("caffeine", "lactose", "paracetamol", "levamisole")), "string")

    profiles = [_entity("ChemicalProfile", i) for i in range(config.profiles)]
    for i, p in enumerate(profiles):
        typed(p, "ChemicalProfile")
        dp(p, "profileCode", f"CP-{i:06d}", "string")

    samples = [_entity("Sample", i) for i in range(config.samples)]
    for i, s in enumerate(samples):
        typed(s, "Sample")
        dp(s, "sampleNumber", str(i), "string")
        dp(s, "drugType", rng.choice(DRUG_TYPES), "string")
        # Many distinct form variants keep blocked candidate groups small.
        dp(s, "chemicalForm", f"{rng.choice(CHEMICAL_FORMS)}-{rng.randrange(125)}", "string")
        dp(s, "height", f"{rng.uniform(5, 300):.1f}", "float")
        dp(s, "width", f"{rng.uniform(5, 300):.1f}", "float")
        if rng.random() < 0.5:
            dp(s, "thickness", f"{rng.uniform(1, 50):.1f}", "float")
        op(s, "comesFrom", sealed[i % config.sealed])
        op(s, "hasExternalAspect", rng.choice(aspects))
        if rng.random() < 0.7:
            op(s, "hasActivePrincipal", rng.choice(principles))
        if rng.random() < 0.4:
            op(s, "hasCuttingProduct", rng.choice(cuttings))
        if rng.random() < 0.3:
            op(s, "hasChimicalProfile", rng.choice(profiles))

    for _ in range(config.close_pairs):
        a, b = rng.sample(samples, 2)
        op(a, "isCloseTo", b)

    return g
