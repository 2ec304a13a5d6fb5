#!/usr/bin/env python3
import random
import unittest
from math import gcd

from klingen.symplectic import (
    GAMMA0_2,
    J,
    PARAMODULAR_K,
    S_MATRIX,
    SP4Z,
    T_MATRIX,
    CosetRep,
    Mat2Z,
    SpRep,
    coset_reps,
    double_coset_reps,
    embed_h11,
    epsilon_cd,
    gamma0_generators,
    is_member,
    L_matrix,
    moebius,
    normalize_pair,
    sp4_generators,
    translation,
)


def random_sl2(rng: random.Random, steps: int = 6) -> Mat2Z:
    g = Mat2Z.identity()
    for _ in range(steps):
        g = g @ translation(rng.randint(-3, 3)) @ S_MATRIX
    return g


class Mat2ZTests(unittest.TestCase):
    def test_inverse_and_transpose(self) -> None:
        g = Mat2Z(2, 3, 1, 2)
        self.assertEqual(g @ g.inverse(), Mat2Z.identity())
        self.assertEqual(g.transpose(), Mat2Z(2, 1, 3, 2))
        with self.assertRaises(ValueError):
            Mat2Z(2, 0, 0, 1).inverse()

    def test_moebius(self) -> None:
        image, j = moebius(S_MATRIX, 1j)
        self.assertAlmostEqual(image, 1j)
        self.assertAlmostEqual(j, -1j)
        _, factor = moebius(S_MATRIX, 1j, 12)
        self.assertAlmostEqual(factor, 1.0)
        _, factor = moebius(Mat2Z(1, 0, 1, 1), 1j, 3)
        self.assertAlmostEqual(factor, (1 + 1j) ** 3)
        with self.assertRaises(ValueError):
            moebius(T_MATRIX, -1j)

    def test_automorphy_factor_cocycle(self) -> None:
        rng = random.Random(20)
        for trial in range(50):
            g1, g2 = random_sl2(rng), random_sl2(rng)
            tau = complex(rng.uniform(-1, 1), rng.uniform(0.3, 2.0))
            inner, j2 = moebius(g2, tau)
            _, j1 = moebius(g1, inner)
            _, j12 = moebius(g1 @ g2, tau)
            with self.subTest(trial=trial):
                self.assertLess(abs(j12 - j1 * j2), 1e-9 * max(1.0, abs(j12)))


class MembershipTests(unittest.TestCase):
    def test_epsilon_cd_for_every_coprime_pair(self) -> None:
        count = 0
        for c in range(-20, 21):
            for d in range(-20, 21):
                if gcd(c, d) != 1:
                    continue
                g = epsilon_cd(c, d)
                (a, b), (c_row, d_row) = g.block("D")
                with self.subTest(c=c, d=d):
                    self.assertTrue(is_member(g, SP4Z))
                    self.assertEqual((c_row, d_row), (c, d))
                    self.assertEqual(a * d - b * c, 1)
                    self.assertEqual(g.block("B"), ((0, 0), (0, 0)))
                    self.assertEqual(g.block("C"), ((0, 0), (0, 0)))
                    if c:
                        self.assertTrue(0 <= a < abs(c))
                count += 1
        self.assertEqual(count, 1024)

    def test_epsilon_cd_blocks(self) -> None:
        g = epsilon_cd(1, 2)
        self.assertEqual(g.block("A"), ((2, -1), (1, 0)))
        self.assertEqual(g.block("D"), ((0, -1), (1, 2)))
        self.assertEqual(g.block("B"), ((0, 0), (0, 0)))

    def test_l_matrix_is_paramodular(self) -> None:
        for level in (1, 2, 3, 5):
            L = L_matrix(level)
            with self.subTest(level=level):
                self.assertTrue(is_member(L, PARAMODULAR_K, level))
                self.assertTrue(is_member(L, SP4Z))

    def test_j_is_not_paramodular(self) -> None:
        self.assertTrue(is_member(J, SP4Z))
        self.assertTrue(is_member(J, PARAMODULAR_K, 1))
        self.assertFalse(is_member(J, PARAMODULAR_K, 2))

    def test_paramodular_allows_fractional_corner(self) -> None:
        rows = ((1, 0, 0, 0), (0, 1, 0, "1/2"), (0, 0, 1, 0), (0, 0, 0, 1))
        g = SpRep.from_rows(rows)
        self.assertTrue(is_member(g, PARAMODULAR_K, 2))
        self.assertFalse(is_member(g, SP4Z))

    def test_double_coset_representatives(self) -> None:
        identity, s1, r = double_coset_reps()
        self.assertTrue(identity.is_identity())
        for g in (s1, r):
            with self.subTest(g=g.rows):
                self.assertTrue(is_member(g, SP4Z))
                self.assertFalse(g.is_identity())

    def test_generators(self) -> None:
        for g in sp4_generators():
            self.assertTrue(is_member(g, SP4Z))
        for level in range(1, 8):
            for gamma in gamma0_generators(level):
                with self.subTest(level=level, gamma=str(gamma)):
                    self.assertTrue(is_member(gamma, GAMMA0_2, level))

    def test_embedding(self) -> None:
        g = embed_h11(S_MATRIX, T_MATRIX)
        self.assertTrue(is_member(g, SP4Z))
        self.assertEqual(g.similitude, 1)
        with self.assertRaises(ValueError):
            embed_h11(Mat2Z(2, 0, 0, 1), T_MATRIX)

    def test_non_symplectic_rejected(self) -> None:
        with self.assertRaises(ValueError):
            SpRep.from_rows(((1, 1, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)))
        with self.assertRaises(ValueError):
            is_member(J, "Gamma_1")


class CosetTests(unittest.TestCase):
    def test_identity_first(self) -> None:
        reps = coset_reps(1, 2)
        self.assertEqual(reps[0], CosetRep(Mat2Z.identity()))
        self.assertEqual(len(reps), 8)
        self.assertEqual(len({rep.key for rep in reps}), len(reps))

    def test_level_divides_bottom_left(self) -> None:
        for rep in coset_reps(4, 12):
            with self.subTest(key=rep.key):
                self.assertEqual(rep.matrix.det, 1)
                self.assertEqual(rep.matrix.c % 4, 0)

    def test_translate_keeps_coset(self) -> None:
        for rep in coset_reps(2, 6):
            moved = rep.translate(3)
            self.assertEqual(moved.key, rep.key)
            self.assertNotEqual(moved.matrix, rep.matrix)

    def test_normalize_pair(self) -> None:
        self.assertEqual(normalize_pair(-2, 3), (2, -3))
        self.assertEqual(normalize_pair(0, -1), (0, 1))
        self.assertEqual(normalize_pair(3, -1), (3, -1))

    def test_rejects_bad_height(self) -> None:
        with self.assertRaises(ValueError):
            coset_reps(1, 0)


if __name__ == "__main__":
    unittest.main()
