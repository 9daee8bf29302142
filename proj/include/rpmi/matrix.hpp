#pragma once

#include <cstddef>
#include <vector>

namespace rpmi {

/// Dense row-major matrix of doubles. Rows index time slots, columns index
/// phase units throughout this project.
struct RowMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    RowMatrix() = default;
    RowMatrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

    bool operator==(const RowMatrix& other) const = default;
};

}  // namespace rpmi
