#!/usr/bin/env python3
import random
import unittest
from math import isqrt, sqrt

import numpy as np

from klingen.quadforms import (
    DiscriminantSplit,
    HalfIntMatrix,
    class_key,
    disc_split,
    index_p_forms,
    lambda_set,
    reduce_definite,
    reduce_singular,
    singular_reducer,
    theta_array,
    theta_coeffs,
    theta_window_constant,
    unimodular_transform,
)
from klingen.symplectic import Mat2Z


def brute_force_theta(T: HalfIntMatrix, order: int) -> list:
    radius = isqrt(4 * order * max(T.n1, T.n2)) + 2
    m, l = np.meshgrid(np.arange(-radius, radius + 1), np.arange(-radius, radius + 1))
    values = (T.n1 * m * m + T.b * m * l + T.n2 * l * l).ravel()
    return np.bincount(values[values < order], minlength=order).tolist()


class HalfIntMatrixTests(unittest.TestCase):
    def test_invariants(self) -> None:
        T = HalfIntMatrix(2, 1, 3)
        self.assertEqual(T.det2, 23)
        self.assertEqual(T.content, 1)
        self.assertTrue(T.is_positive_definite())
        self.assertEqual(HalfIntMatrix(2, 4, 2).content, 2)
        self.assertTrue(HalfIntMatrix(1, 2, 1).is_singular())
        self.assertFalse(HalfIntMatrix(1, 3, 1).is_semidefinite())
        self.assertEqual(T.swapped(), HalfIntMatrix(3, 1, 2))

    def test_lambda_set(self) -> None:
        self.assertEqual([T.b for T in lambda_set(1, 1)], [-2, -1, 0, 1, 2])
        self.assertEqual(len(lambda_set(2, 3)), 9)
        self.assertEqual(lambda_set(0, 5), [HalfIntMatrix(0, 0, 5)])
        self.assertTrue(all(T.is_semidefinite() for T in lambda_set(3, 4)))
        with self.assertRaises(ValueError):
            lambda_set(-1, 1)


class DiscriminantSplitTests(unittest.TestCase):
    def test_examples(self) -> None:
        cases = {
            (1, 0, 1): (1, 4),
            (1, 1, 1): (1, 3),
            (2, 0, 2): (2, 4),
            (1, 0, 2): (1, 8),
            (3, 0, 3): (3, 4),
        }
        for form, (f_T, Delta_T) in cases.items():
            with self.subTest(form=form):
                self.assertEqual(disc_split(HalfIntMatrix(*form)), DiscriminantSplit(f_T, Delta_T))

    def test_split_recovers_determinant(self) -> None:
        for T in lambda_set(4, 5):
            if T.det2 <= 0:
                continue
            split = disc_split(T)
            with self.subTest(T=str(T)):
                self.assertEqual(split.f_T**2 * split.Delta_T, T.det2)
                self.assertEqual(split.character.discriminant, -split.Delta_T)

    def test_rejects_singular(self) -> None:
        with self.assertRaises(ValueError):
            disc_split(HalfIntMatrix(1, 2, 1))


class ReductionTests(unittest.TestCase):
    def test_definite_reduction(self) -> None:
        reduced, U = reduce_definite(HalfIntMatrix(1, 2, 5))
        self.assertEqual(reduced, HalfIntMatrix(1, 0, 4))
        self.assertEqual(unimodular_transform(HalfIntMatrix(1, 2, 5), U), reduced)
        self.assertEqual(U.det, 1)

    def test_reduced_forms_are_reduced(self) -> None:
        for T in lambda_set(5, 7):
            if not T.is_positive_definite():
                continue
            reduced, U = reduce_definite(T)
            with self.subTest(T=str(T)):
                self.assertLessEqual(abs(reduced.b), reduced.n1)
                self.assertLessEqual(reduced.n1, reduced.n2)
                self.assertEqual(reduced.det2, T.det2)
                self.assertEqual(unimodular_transform(T, U), reduced)

    def test_class_key(self) -> None:
        self.assertEqual(class_key(HalfIntMatrix(1, -1, 1)), (1, 1, 1))
        self.assertEqual(class_key(HalfIntMatrix(2, -1, 3)), class_key(HalfIntMatrix(2, 1, 3)))
        self.assertEqual(class_key(HalfIntMatrix(4, 4, 1)), (1, 0, 0))
        with self.assertRaises(ValueError):
            class_key(HalfIntMatrix(1, 3, 1))

    def test_singular_reducer(self) -> None:
        T = HalfIntMatrix(1, 2, 1)
        U = singular_reducer(T)
        self.assertEqual(U, Mat2Z(0, 1, 1, -1))
        self.assertEqual(unimodular_transform(T, U), HalfIntMatrix(1, 0, 0))
        for form in ((2, 4, 2), (4, -4, 1), (3, 0, 0), (0, 0, 5), (9, 12, 4)):
            T = HalfIntMatrix(*form)
            U = singular_reducer(T)
            with self.subTest(form=form):
                self.assertIn(U.det, (1, -1))
                self.assertEqual(unimodular_transform(T, U), HalfIntMatrix(reduce_singular(T), 0, 0))


class ThetaTests(unittest.TestCase):
    def test_sum_of_two_squares(self) -> None:
        self.assertEqual(theta_coeffs(HalfIntMatrix(1, 0, 1), 6), [1, 4, 4, 0, 4, 8])

    def test_hexagonal_lattice(self) -> None:
        self.assertEqual(theta_coeffs(HalfIntMatrix(1, 1, 1), 5), [1, 6, 0, 6, 6])

    def test_matches_brute_force(self) -> None:
        for form in ((2, 1, 3), (1, 0, 2), (3, -2, 5)):
            T = HalfIntMatrix(*form)
            with self.subTest(form=form):
                self.assertEqual(theta_coeffs(T, 60), brute_force_theta(T, 60))

    def test_unimodular_invariance(self) -> None:
        rng = random.Random(11)
        forms = [HalfIntMatrix(1, 0, 1), HalfIntMatrix(1, 1, 1), HalfIntMatrix(2, 1, 3), HalfIntMatrix(1, 0, 2)]
        for trial in range(20):
            T = forms[trial % len(forms)]
            U = Mat2Z.identity()
            for _ in range(2):
                U = U @ Mat2Z(1, rng.randint(-2, 2), 0, 1) @ Mat2Z(0, -1, 1, 0)
            moved = unimodular_transform(T, U)
            with self.subTest(trial=trial, moved=str(moved)):
                self.assertEqual(brute_force_theta(moved, 50), theta_coeffs(T, 50))
                self.assertEqual(theta_coeffs(moved, 50), theta_coeffs(T, 50))

    def test_index_p_neighbours(self) -> None:
        identity = HalfIntMatrix(1, 0, 1)
        self.assertEqual(index_p_forms(identity, 2), [HalfIntMatrix(1, 2, 2)])
        self.assertEqual(class_key(HalfIntMatrix(1, 2, 2)), class_key(identity))
        self.assertEqual(index_p_forms(HalfIntMatrix(1, 1, 1), 2), [])
        doubled = HalfIntMatrix(2, 0, 2)
        neighbours = index_p_forms(doubled, 2)
        self.assertEqual(neighbours, [HalfIntMatrix(1, 0, 4), HalfIntMatrix(2, 4, 4), HalfIntMatrix(4, 0, 1)])
        self.assertTrue(all(S.det2 == doubled.det2 for S in neighbours))
        with self.assertRaises(ValueError):
            unimodular_transform(identity, Mat2Z(2, 0, 0, 1))

    def test_array_is_read_only(self) -> None:
        values = theta_array(HalfIntMatrix(1, 0, 1), 10)
        with self.assertRaises(ValueError):
            values[0] = 5

    def test_window_constant_bounds_counts(self) -> None:
        for form in ((1, 0, 1), (1, 1, 1), (2, 1, 3), (1, 0, 5)):
            T = HalfIntMatrix(*form)
            constant = theta_window_constant(T)
            counts = theta_coeffs(T, 400)
            with self.subTest(form=form):
                for m in range(1, 400):
                    self.assertLessEqual(counts[m], constant * sqrt(m) + 4)

    def test_rejects_non_definite(self) -> None:
        with self.assertRaises(ValueError):
            theta_coeffs(HalfIntMatrix(1, 2, 1), 5)


if __name__ == "__main__":
    unittest.main()
