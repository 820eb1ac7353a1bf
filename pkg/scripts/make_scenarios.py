"""Regenerate the golden scenario files under scenarios/."""

from pathlib import Path

import numpy as np

from proframes.cli import generate_scenario
from proframes.frames import Frame, frame_from_projection, standard_frame
from proframes.generate import random_projection, rng_for
from proframes.hilbert_module import ModuleElement, ModuleSpace, Multiplier
from proframes.prosystem import SeminormChain
from proframes.serialize import Scenario, chain_to_json, dumps, element_blocks_to_json, scenario_to_json

OUT = Path(__file__).resolve().parent.parent / "scenarios"


def scalar(vectors):
    vs = np.asarray(vectors, dtype=complex)
    space = ModuleSpace(SeminormChain.single((1,)), vs.shape[1])
    hs = [Multiplier.from_element(ModuleElement.from_blocks(space, [v.reshape(-1, 1)])) for v in vs]
    return Frame(space, hs)


def write(name, obj):
    (OUT / name).write_text(dumps(obj), encoding="utf-8")


def main():
    OUT.mkdir(exist_ok=True)
    chain = SeminormChain(((2,), (2, 1), (3, 2, 1)), ((0,), (1, 2)))
    std = standard_frame(chain, 3)
    write("standard_basis.json", scenario_to_json(Scenario(chain, std.space, {"e": std})))

    r3 = np.sqrt(3) / 2
    m = scalar([[1, 0], [-0.5, r3], [-0.5, -r3]])
    write("mercedes.json", scenario_to_json(Scenario(m.space.chain, m.space, {"m": m})))

    two = scalar([[1], [1]])
    write("two_ones.json", scenario_to_json(Scenario(two.space.chain, two.space, {"f": two})))

    degenerate = scalar([[1, 0], [2, 0]])
    write("degenerate.json", scenario_to_json(Scenario(degenerate.space.chain, degenerate.space, {"f": degenerate})))

    write("random_free.json", scenario_to_json(generate_scenario(42, 2, [2, 1], 2, 4)))
    write("random_projective.json", scenario_to_json(generate_scenario(7, 3, [2, 2, 1], 3, 5, projective=True)))

    P = random_projection(rng_for(3), chain, 2)
    pf = frame_from_projection(P)
    write("projection_frame.json", scenario_to_json(Scenario(chain, pf.space, {"p": pf})))

    # P^2 - P is off by about 1e-3 in the second diagonal entry
    single = SeminormChain.single((1,))
    ok = scalar([[1, 0]])
    bad = scenario_to_json(Scenario(single, ok.space, {"f": ok}))
    entry = lambda x: element_blocks_to_json([np.array([[x]])])
    bad["module"]["projection"] = [[entry(1.0), entry(0.0)], [entry(0.0), entry(1e-3)]]
    write("bad_projection.json", bad)
    write(
        "empty_frame.json",
        {"algebra": chain_to_json(single), "module": {"rank": 1, "projection": None}, "frames": {"f": []}},
    )
    (OUT / "malformed.json").write_text('{"algebra": {"levels": [{"blocks": [1]}]},\n', encoding="utf-8")


if __name__ == "__main__":
    main()
