"""Composition and inversion of the equivalence group on random draws, and the
symmetry subgroup generators."""
import argparse
import random

from ebequiv import derivation as dv
from ebequiv import symmetry as sy
from ebequiv.oracle import random_moebius_params
from ebequiv.textio import to_text
from ebequiv.transform import PointTransformation


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--draws", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    group = dv.EquivParams.group()
    failures = 0
    for _ in range(args.draws):
        p = dv.EquivParams.from_mapping(random_moebius_params(rng, False), group)
        q = dv.EquivParams.from_mapping(random_moebius_params(rng, False), group)
        ok = dv.same_transformation(dv.theorem1_transformation(dv.compose(p, dv.inverse(p))),
                                    PointTransformation.identity())
        ok &= dv.same_transformation(
            dv.theorem1_transformation(dv.compose(p, q)),
            dv._compose_T(dv.theorem1_transformation(p), dv.theorem1_transformation(q)))
        failures += not ok
    print(f"equivalence group: {args.draws} draws, {failures} failures")
    print("symmetry subgroup generators:")
    for i in range(1, 7):
        v = sy.generator_of_subgroup(i)
        print(f"  p{i}: xi_t = {to_text(v.xi_t)}, phi = {to_text(v.phi)}, "
              f"symmetry: {sy.check_infinitesimal_symmetry(v)}")


if __name__ == "__main__":
    main()
