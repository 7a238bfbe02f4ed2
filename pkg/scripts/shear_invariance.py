"""Randomized check of the shearing degree against the lattice determinant.

Draws random integer slope pairs and verifies that the shearing degree
equals |det| for nonparallel pairs, reports "trivial" for parallel ones,
and is invariant under random unimodular basis changes.

    python3 scripts/shear_invariance.py --trials 1000 --seed 7
"""

import argparse
import random

from procong.ntform import shearing_from_slopes


def random_unimodular(rng):
    a, b, c = rng.randrange(-4, 5), rng.randrange(-4, 5), rng.randrange(-4, 5)
    # lower-times-upper triangular product is always unimodular
    lower = ((1, 0), (a, 1))
    upper = ((1, b), (0, 1)) if rng.random() < 0.5 else ((-1, c), (0, -1))
    return tuple(tuple(sum(lower[i][k] * upper[k][j] for k in range(2))
                       for j in range(2)) for i in range(2))


def apply(mat, slope):
    return (mat[0][0] * slope[0] + mat[0][1] * slope[1],
            mat[1][0] * slope[0] + mat[1][1] * slope[1])


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--span", type=int, default=30,
                        help="entries drawn from [-span, span]")
    args = parser.parse_args()
    rng = random.Random(args.seed)

    nonparallel = parallel = 0
    for _ in range(args.trials):
        while True:
            g = (rng.randrange(-args.span, args.span + 1),
                 rng.randrange(-args.span, args.span + 1))
            h = (rng.randrange(-args.span, args.span + 1),
                 rng.randrange(-args.span, args.span + 1))
            if g != (0, 0) and h != (0, 0):
                break
        det = g[0] * h[1] - g[1] * h[0]
        degree = shearing_from_slopes(g, h)
        if det == 0:
            assert degree == "trivial", (g, h, degree)
            parallel += 1
        else:
            assert degree == abs(det), (g, h, degree)
            nonparallel += 1
        u = random_unimodular(rng)
        assert shearing_from_slopes(apply(u, g), apply(u, h)) == degree
        k = rng.choice([-3, -2, 2, 3])
        scaled = shearing_from_slopes((k * g[0], k * g[1]), h)
        expected = "trivial" if det == 0 else abs(k * det)
        assert scaled == expected

    print(f"{args.trials} trials: {nonparallel} nonparallel pairs matched "
          f"|det|, {parallel} parallel pairs reported trivial")
    print("unimodular invariance and scaling law held throughout")


if __name__ == "__main__":
    main()
