"""Exception hierarchy. Every error carries a stable ``code`` used by the CLI."""


class AncestryError(Exception):
    code = "ancestry_error"

    def to_dict(self):
        return {"error": self.code, "message": str(self)}


class RankDeficient(AncestryError, ValueError):
    code = "rank_deficient"

    def __init__(self, n_columns, ratio):
        self.n_columns = n_columns
        self.ratio = ratio
        super().__init__(
            f"design with {n_columns} columns is rank deficient "
            f"(singular value ratio {ratio:.3g})"
        )


class InsufficientData(AncestryError, ValueError):
    code = "insufficient_data"


class NumericOverflow(AncestryError, FloatingPointError):
    code = "numeric_overflow"

    def __init__(self, row, message=None):
        self.row = row
        super().__init__(message or f"non-finite transformed residual at row {row}")


class InvalidPValue(AncestryError, ValueError):
    code = "invalid_p_value"


class InvalidModel(AncestryError, ValueError):
    code = "invalid_model"


class UnstableModel(InvalidModel):
    code = "unstable_model"


class ParseError(AncestryError, ValueError):
    code = "parse_error"

    def __init__(self, row, column, value):
        self.row = row
        self.column = column
        super().__init__(f"non-numeric value {value!r} at row {row}, column {column!r}")


class MissingData(AncestryError, ValueError):
    code = "missing_data"

    def __init__(self, row, column):
        self.row = row
        self.column = column
        super().__init__(f"missing value at row {row}, column {column!r}")
