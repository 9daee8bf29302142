#include "rpmi/pnseq.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rpmi/errors.hpp"
#include "rpmi/rng.hpp"

namespace rpmi {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxOrder = 24;  // state and period fit comfortably in 32/64 bits

/// Pack a bit sequence into 64-bit words, bit t -> word t/64, bit t%64.
std::vector<std::uint64_t> pack_bits(const std::vector<std::uint8_t>& bits) {
    std::vector<std::uint64_t> words((bits.size() + 63) / 64, 0);
    for (std::size_t t = 0; t < bits.size(); ++t) {
        if (bits[t]) words[t / 64] |= std::uint64_t{1} << (t % 64);
    }
    return words;
}

bool all_zero(const std::vector<std::uint64_t>& w) {
    return std::all_of(w.begin(), w.end(), [](std::uint64_t x) { return x == 0; });
}

/// Incremental GF(2) independence test: rows are packed sequences; basis rows
/// are kept reduced with recorded pivot bit positions.
class Gf2Basis {
public:
    /// Reduces `row` in place against the basis; if a nonzero remainder is
    /// left, absorbs it and returns true (row was independent).
    bool try_insert(std::vector<std::uint64_t> row) {
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            if (row[pivots_[k] / 64] >> (pivots_[k] % 64) & 1) {
                for (std::size_t w = 0; w < row.size(); ++w) row[w] ^= rows_[k][w];
            }
        }
        if (all_zero(row)) return false;
        std::size_t pivot = 0;
        for (std::size_t w = 0; w < row.size(); ++w) {
            if (row[w]) {
                pivot = w * 64 + std::countr_zero(row[w]);
                break;
            }
        }
        rows_.push_back(std::move(row));
        pivots_.push_back(pivot);
        return true;
    }

    int rank() const { return static_cast<int>(rows_.size()); }

private:
    std::vector<std::vector<std::uint64_t>> rows_;
    std::vector<std::size_t> pivots_;
};

ShiftSelection run_shift_search(const MSequence& seq, int count, bool strict) {
    const int order = seq.source_poly.order();
    const long period = seq.period();
    if (count < 1) throw std::invalid_argument("shift selection: count must be >= 1");
    if (count > period) {
        throw std::invalid_argument("shift selection: count " + std::to_string(count) +
                                    " exceeds the number of distinct shifts " +
                                    std::to_string(period));
    }
    if (count > order + 1) {
        std::clog << "warning: requesting " << count << " shifts from an order-" << order
                  << " generator exceeds the order+1 rule of thumb; "
                     "the search outcome below is authoritative\n";
    }

    ShiftSelection sel;
    Gf2Basis basis;
    for (long offset = 0; offset < period && sel.independent_rank < count; ++offset) {
        if (basis.rank() == order) break;  // family rank is exactly the order
        if (basis.try_insert(pack_bits(rotate(seq, static_cast<int>(offset)).bits))) {
            sel.offsets.push_back(static_cast<int>(offset));
            ++sel.independent_rank;
        }
    }
    if (sel.independent_rank < count) {
        if (strict) throw InfeasibleSelectionError(order, count, basis.rank());
        sel.subset_xor_free = false;
        // Pad with the smallest offsets not yet selected; each added row is
        // linearly dependent on the independent prefix.
        for (long offset = 0; static_cast<int>(sel.offsets.size()) < count; ++offset) {
            if (std::find(sel.offsets.begin(), sel.offsets.end(), offset) == sel.offsets.end()) {
                sel.offsets.push_back(static_cast<int>(offset));
            }
        }
    }
    return sel;
}

PhaseSequenceSet assemble_designed_set(const GeneratorPolynomial& poly, int slots,
                                       std::uint32_t lfsr_seed, const ShiftSelection& sel,
                                       const MSequence& base) {
    const int units = static_cast<int>(base.period()) + 1;
    PhaseSequenceSet set;
    set.mode = PhaseSetMode::kDesigned;
    set.phases = RowMatrix(slots, units);
    for (int i = 0; i + 1 < slots; ++i) {
        const auto row = codes_to_phases(balance(rotate(base, sel.offsets[i])));
        for (int j = 0; j < units; ++j) set.phases.at(i, j) = row[j];
    }
    RowMatrix head(slots - 1, units);
    std::copy_n(set.phases.data.begin(), static_cast<std::size_t>(slots - 1) * units,
                head.data.begin());
    const auto last = closure_sequence(head);
    for (int j = 0; j < units; ++j) set.phases.at(slots - 1, j) = last[j];
    set.design = DesignInfo{poly, lfsr_seed, sel.offsets, sel.independent_rank,
                            sel.subset_xor_free};
    set.validate();
    return set;
}

}  // namespace

GeneratorPolynomial::GeneratorPolynomial(int order, const std::vector<int>& exponents)
    : order_(order), taps_(0) {
    if (order < 2 || order > kMaxOrder) {
        throw std::invalid_argument("polynomial order must be in [2, " +
                                    std::to_string(kMaxOrder) + "], got " +
                                    std::to_string(order));
    }
    for (int e : exponents) {
        if (e < 0 || e > order) {
            throw std::invalid_argument("polynomial exponent " + std::to_string(e) +
                                        " outside [0, order=" + std::to_string(order) + "]");
        }
        taps_ |= std::uint32_t{1} << e;
    }
    if (!(taps_ & 1u) || !(taps_ >> order & 1u)) {
        throw std::invalid_argument(
            "polynomial must include both the x^0 and x^order terms");
    }
}

GeneratorPolynomial GeneratorPolynomial::parse(const std::string& text) {
    std::string compact;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
    }
    if (compact.empty()) throw std::invalid_argument("empty polynomial text");
    std::vector<int> exponents;
    std::stringstream ss(compact);
    std::string term;
    while (std::getline(ss, term, '+')) {
        if (term == "1") {
            exponents.push_back(0);
        } else if (term == "x") {
            exponents.push_back(1);
        } else if (term.size() > 2 && term[0] == 'x' && term[1] == '^') {
            std::size_t pos = 0;
            int e = std::stoi(term.substr(2), &pos);
            if (pos != term.size() - 2) {
                throw std::invalid_argument("bad polynomial term '" + term + "'");
            }
            exponents.push_back(e);
        } else {
            throw std::invalid_argument("bad polynomial term '" + term + "' in '" + text + "'");
        }
    }
    int order = *std::max_element(exponents.begin(), exponents.end());
    return GeneratorPolynomial(order, exponents);
}

GeneratorPolynomial GeneratorPolynomial::primitive(int order) {
    // Classic maximal-length feedback taps (degree table, exponent sets).
    static const std::vector<std::vector<int>> table = {
        /* 2*/ {0, 1, 2},
        /* 3*/ {0, 1, 3},
        /* 4*/ {0, 1, 4},
        /* 5*/ {0, 2, 5},
        /* 6*/ {0, 1, 6},
        /* 7*/ {0, 1, 7},
        /* 8*/ {0, 2, 3, 4, 8},
        /* 9*/ {0, 4, 9},
        /*10*/ {0, 3, 10},
        /*11*/ {0, 2, 11},
        /*12*/ {0, 1, 4, 6, 12},
        /*13*/ {0, 1, 3, 4, 13},
        /*14*/ {0, 1, 3, 5, 14},
        /*15*/ {0, 1, 15},
        /*16*/ {0, 4, 13, 15, 16},
    };
    if (order < 2 || order > 16) {
        throw std::invalid_argument("no vetted primitive polynomial for order " +
                                    std::to_string(order) + " (table covers 2..16)");
    }
    return GeneratorPolynomial(order, table[order - 2]);
}

std::vector<int> GeneratorPolynomial::exponents() const {
    std::vector<int> out;
    for (int e = 0; e <= order_; ++e) {
        if (taps_ >> e & 1u) out.push_back(e);
    }
    return out;
}

std::string GeneratorPolynomial::to_string() const {
    std::string out;
    for (int e : exponents()) {
        if (!out.empty()) out += "+";
        if (e == 0) {
            out += "1";
        } else if (e == 1) {
            out += "x";
        } else {
            out += "x^" + std::to_string(e);
        }
    }
    return out;
}

MSequence lfsr_generate(const GeneratorPolynomial& poly, std::uint32_t seed) {
    const int n = poly.order();
    const std::uint32_t state_mask = (std::uint32_t{1} << n) - 1;
    std::uint32_t state = seed & state_mask;
    if (seed == 0 || state == 0) {
        throw std::invalid_argument("LFSR seed must be a nonzero n-bit state");
    }
    if (seed != state) {
        throw std::invalid_argument("LFSR seed has bits above the register width");
    }
    // Fibonacci form: state bit k holds a_{t+k}; output a_t; feedback
    // a_{t+n} = sum over the low taps (x^0..x^{n-1} coefficients) of a_{t+e}.
    const std::uint32_t low_taps = poly.tap_mask() & state_mask;
    const long period = (1L << n) - 1;
    const std::uint32_t start = state;
    MSequence seq{.bits = {}, .source_poly = poly, .shift = 0};
    seq.bits.reserve(period);
    for (long t = 0; t < period; ++t) {
        seq.bits.push_back(static_cast<std::uint8_t>(state & 1u));
        const std::uint32_t fb = static_cast<std::uint32_t>(std::popcount(state & low_taps)) & 1u;
        state = (state >> 1) | (fb << (n - 1));
        if (state == start && t + 1 < period) {
            throw NonPrimitivePolynomialError(n, t + 1);
        }
    }
    if (state != start) {
        // Unreachable for an invertible update (x^0 tap present): nonzero
        // states permute, so every orbit closes within 2^n - 1 steps.
        throw std::logic_error("LFSR state failed to close after a full period");
    }
    return seq;
}

MSequence rotate(const MSequence& seq, int offset) {
    const long period = seq.period();
    long k = ((offset % period) + period) % period;
    MSequence out{.bits = std::vector<std::uint8_t>(seq.bits.size()),
                  .source_poly = seq.source_poly,
                  .shift = static_cast<int>((seq.shift + k) % period)};
    for (long t = 0; t < period; ++t) out.bits[t] = seq.bits[(t + k) % period];
    return out;
}

std::vector<MSequence> enumerate_shifts(const MSequence& seq) {
    std::vector<MSequence> out;
    out.reserve(seq.period());
    for (long k = 0; k < seq.period(); ++k) out.push_back(rotate(seq, static_cast<int>(k)));
    return out;
}

BalancedCodeSequence balance(const MSequence& seq) {
    const long period = seq.period();
    const long ones = std::count(seq.bits.begin(), seq.bits.end(), std::uint8_t{1});
    if (ones != (period + 1) / 2) {
        throw std::invalid_argument("balance: input has " + std::to_string(ones) +
                                    " ones, expected " + std::to_string((period + 1) / 2));
    }
    BalancedCodeSequence out{.codes = seq.bits};
    out.codes.push_back(0);
    return out;
}

std::vector<double> codes_to_phases(const BalancedCodeSequence& codes) {
    std::vector<double> phases(codes.codes.size());
    long seen[2] = {0, 0};
    for (std::size_t j = 0; j < codes.codes.size(); ++j) {
        const int c = codes.codes[j];
        if (c != 0 && c != 1) throw std::invalid_argument("codes must be 0/1");
        const bool odd = (++seen[c] % 2) == 1;
        phases[j] = (c == 0) ? (odd ? 0.0 : kPi) : (odd ? kPi / 2 : 3 * kPi / 2);
    }
    return phases;
}

std::vector<double> closure_sequence(const RowMatrix& rows) {
    if (rows.rows < 1 || rows.cols < 1) {
        throw std::invalid_argument("closure_sequence: need at least one row and column");
    }
    std::vector<double> out(rows.cols);
    for (int j = 0; j < rows.cols; ++j) {
        double sum = 0.0;
        for (int i = 0; i < rows.rows; ++i) {
            const double v = rows.at(i, j);
            if (!std::isfinite(v)) {
                throw std::invalid_argument("closure_sequence: non-finite phase entry");
            }
            sum += v;
        }
        double r = std::fmod(sum, kTwoPi);
        if (r < 0) r += kTwoPi;
        out[j] = kTwoPi - r;  // lands in (0, 2*pi]; 2*pi encodes the mod-zero corner
    }
    return out;
}

std::vector<int> select_shifts(const MSequence& seq, int count) {
    return run_shift_search(seq, count, /*strict=*/true).offsets;
}

ShiftSelection select_shifts_best_effort(const MSequence& seq, int count) {
    return run_shift_search(seq, count, /*strict=*/false);
}

double PhaseSequenceSet::max_closure_defect() const {
    double worst = 0.0;
    for (int j = 0; j < phases.cols; ++j) {
        double sum = 0.0;
        for (int i = 0; i < phases.rows; ++i) sum += phases.at(i, j);
        worst = std::max(worst, std::fabs(std::remainder(sum, kTwoPi)));
    }
    return worst;
}

void PhaseSequenceSet::validate() const {
    if (phases.rows < 2 || phases.cols < 1) {
        throw std::invalid_argument("phase set needs at least 2 slots and 1 unit");
    }
    for (double v : phases.data) {
        if (!std::isfinite(v)) throw std::invalid_argument("phase set has non-finite entry");
    }
    const double quarter = kPi / 2;
    for (int i = 0; i + 1 < phases.rows; ++i) {
        for (int j = 0; j < phases.cols; ++j) {
            const double v = phases.at(i, j);
            if (mode == PhaseSetMode::kDesigned) {
                // Mapped rows use the exact four-letter alphabet.
                if (v != 0.0 && v != quarter && v != kPi && v != 3 * quarter) {
                    throw std::invalid_argument(
                        "designed phase row contains a value outside {0, pi/2, pi, 3pi/2}");
                }
            } else if (v < 0.0 || v >= kTwoPi) {
                throw std::invalid_argument("uniform phase row entry outside [0, 2*pi)");
            }
        }
    }
    for (int j = 0; j < phases.cols; ++j) {
        const double v = phases.at(phases.rows - 1, j);
        if (v <= 0.0 || v > kTwoPi + 1e-9) {
            throw std::invalid_argument("closure row entry outside (0, 2*pi]");
        }
    }
    if (max_closure_defect() > 1e-12) {
        throw std::invalid_argument("phase set violates the column closure invariant");
    }
}

PhaseSequenceSet build_phase_set(const GeneratorPolynomial& poly, int slots,
                                 std::uint32_t lfsr_seed) {
    if (slots < 2) throw std::invalid_argument("designed phase set needs slots >= 2");
    const MSequence base = lfsr_generate(poly, lfsr_seed);
    const ShiftSelection sel = run_shift_search(base, slots - 1, /*strict=*/true);
    return assemble_designed_set(poly, slots, lfsr_seed, sel, base);
}

PhaseSequenceSet build_phase_set_best_effort(const GeneratorPolynomial& poly, int slots,
                                             std::uint32_t lfsr_seed) {
    if (slots < 2) throw std::invalid_argument("designed phase set needs slots >= 2");
    const MSequence base = lfsr_generate(poly, lfsr_seed);
    const ShiftSelection sel = run_shift_search(base, slots - 1, /*strict=*/false);
    return assemble_designed_set(poly, slots, lfsr_seed, sel, base);
}

PhaseSequenceSet random_phase_set(int slots, int units, std::uint64_t seed) {
    if (slots < 2) throw std::invalid_argument("random phase set needs slots >= 2");
    if (units < 1) throw std::invalid_argument("random phase set needs units >= 1");
    PhaseSequenceSet set;
    set.mode = PhaseSetMode::kUniformRandom;
    set.phases = RowMatrix(slots, units);
    std::mt19937_64 rng(derive_stream_seed(seed, 0));
    for (int i = 0; i + 1 < slots; ++i) {
        for (int j = 0; j < units; ++j) {
            set.phases.at(i, j) = kTwoPi * uniform_unit(rng);
        }
    }
    RowMatrix head(slots - 1, units);
    std::copy_n(set.phases.data.begin(), static_cast<std::size_t>(slots - 1) * units,
                head.data.begin());
    const auto last = closure_sequence(head);
    for (int j = 0; j < units; ++j) set.phases.at(slots - 1, j) = last[j];
    set.validate();
    return set;
}

}  // namespace rpmi
