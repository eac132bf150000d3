# type: ignore
import unittest
from unittest import TestCase

from attr import define  # type: ignore
from parameterized import parameterized  # type: ignore

from blindqc.exceptions import InvalidOperationError
from blindqc.models.reports import FilterReportModel
from blindqc.typed_list import DataSequence


@define(frozen=True)
class Row:
    y: str
    theta: int
    probability: float


class TestDataSequence(TestCase):
    def setUp(self):
        self.rows = [Row("00", 0, 0.25), Row("01", 4, 0.25), Row("10", 4, 0.5)]
        self.sequence = DataSequence(Row, self.rows)

    @parameterized.expand([(str, ["a"]), (int, [1, 2])])
    def test_plain_types_rejected(self, _type, iterable):
        # Arrange, Act, Assert
        with self.assertRaises(TypeError):
            DataSequence(_type, iterable)

    def test_item_type_checked(self):
        # Arrange, Act, Assert
        with self.assertRaises(TypeError):
            DataSequence(Row, [Row("00", 0, 1.0), "row"])

    def test_pydantic_rows(self):
        # Arrange, Act
        sequence = DataSequence(FilterReportModel, [FilterReportModel(total=2, accepted=1, rate=0.5, counts={"0": 1})])

        # Assert
        self.assertEqual(sequence.first().accepted, 1)
        self.assertIn("accepted: 1", str(sequence))

    def test_repr(self):
        # Arrange, Act
        representation = repr(DataSequence(Row, [Row("00", 0, 1.0)]))

        # Assert
        self.assertEqual(representation, "DataSequence(Row, [Row(y='00', theta=0, probability=1.0)])")

    def test_len_iter_getitem(self):
        # Arrange, Act, Assert
        self.assertEqual(len(self.sequence), 3)
        self.assertEqual(list(self.sequence), self.rows)
        self.assertEqual(self.sequence[1], self.rows[1])
        self.assertEqual(self.sequence[1:], DataSequence(Row, self.rows[1:]))

    @parameterized.expand([({"theta": 4}, 2), ({"theta": 4, "y": "10"}, 1), ({"theta": 7}, 0)])
    def test_filter(self, kwargs, expected):
        # Arrange, Act
        filtered = self.sequence.filter(**kwargs)

        # Assert
        self.assertEqual(len(filtered), expected)
        self.assertTrue(all(row.theta == kwargs["theta"] for row in filtered))

    def test_first(self):
        # Arrange, Act, Assert
        self.assertEqual(self.sequence.filter(theta=4).first().y, "01")
        with self.assertRaises(InvalidOperationError):
            self.sequence.filter(theta=7).first()

    def test_single_or_default(self):
        # Arrange, Act, Assert
        self.assertEqual(self.sequence.filter(y="10").single_or_default().probability, 0.5)
        self.assertIsNone(self.sequence.filter(y="11").single_or_default())
        self.assertEqual(self.sequence.filter(y="11").single_or_default("none"), "none")
        with self.assertRaises(InvalidOperationError):
            self.sequence.single_or_default()

    def test_sum(self):
        # Arrange, Act, Assert
        self.assertAlmostEqual(self.sequence.sum("probability"), 1.0)

    def test_str(self):
        # Arrange, Act
        text = str(DataSequence(Row, [Row("00", 0, 1.0)]))

        # Assert
        self.assertEqual(text, "\nRow(\n    y: 00, \n    theta: 0, \n    probability: 1.0, \n)")


if __name__ == "__main__":
    unittest.main()
