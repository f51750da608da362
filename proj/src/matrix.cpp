#include "tennis/matrix.hpp"

#include <algorithm>

#include "tennis/error.hpp"

namespace tennis {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows)
{
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols_) {
            throw Error(Errc::DimensionMismatch, "ragged rows in matrix literal");
        }
        std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    }
    return m;
}

std::vector<double> Matrix::column(std::size_t c) const
{
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        out[r] = (*this)(r, c);
    }
    return out;
}

void Matrix::append_row(std::span<const double> values)
{
    if (rows_ == 0 && cols_ == 0) {
        cols_ = values.size();
    }
    if (values.size() != cols_) {
        throw Error(Errc::DimensionMismatch, "row width does not match matrix");
    }
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

} // namespace tennis
