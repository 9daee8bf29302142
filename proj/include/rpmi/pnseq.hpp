#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rpmi/matrix.hpp"

namespace rpmi {

/// A binary polynomial f(x) = sum_{e in taps} x^e intended to be primitive of
/// degree `order`. Coefficients of x^0 and x^n must both be present so the
/// shift register it drives is invertible. Primitivity itself is not checked
/// at construction; lfsr_generate() verifies the maximal period 2^n - 1 and
/// rejects the polynomial otherwise.
class GeneratorPolynomial {
public:
    /// Build from the set of exponents with nonzero coefficient,
    /// e.g. {0, 2, 3, 4, 8} for 1 + x^2 + x^3 + x^4 + x^8.
    GeneratorPolynomial(int order, const std::vector<int>& exponents);

    /// Parse the exponent-list text form, e.g. "1+x^2+x^3+x^4+x^8".
    static GeneratorPolynomial parse(const std::string& text);

    /// Vetted primitive polynomial for each order n in [2, 16].
    static GeneratorPolynomial primitive(int order);

    int order() const { return order_; }
    /// Bit e set means coefficient of x^e is 1.
    std::uint32_t tap_mask() const { return taps_; }
    std::vector<int> exponents() const;
    /// Text form "1+x^2+...+x^n".
    std::string to_string() const;

    bool operator==(const GeneratorPolynomial& other) const = default;

private:
    int order_;
    std::uint32_t taps_;
};

/// One full period of a maximal-length LFSR output. `shift` is the cyclic
/// offset relative to the sequence this one was rotated from.
struct MSequence {
    std::vector<std::uint8_t> bits;  // length 2^n - 1
    GeneratorPolynomial source_poly;
    int shift = 0;

    long period() const { return static_cast<long>(bits.size()); }
};

/// An M-sequence padded with one 0 so ones and zeros both count 2^(n-1).
struct BalancedCodeSequence {
    std::vector<std::uint8_t> codes;  // length 2^n
};

enum class PhaseSetMode { kDesigned, kUniformRandom };

/// Provenance of a designed phase set: which polynomial, LFSR seed and shift
/// offsets produced rows 1..N-1.
struct DesignInfo {
    GeneratorPolynomial poly;
    std::uint32_t lfsr_seed = 1;
    std::vector<int> shifts;
    /// Size of the largest subset-XOR-free family among the chosen shifts.
    int independent_rank = 0;
    /// True when no nonempty subset of the chosen shifted sequences XORs to
    /// the all-zero sequence (the condition for full cross-term cancellation).
    bool subset_xor_free = true;
};

/// N x M matrix of modulation phases. Rows 1..N-1 carry the four-valued
/// mapped codes (or uniform draws); the last row closes each column so the
/// per-column phase sum is a multiple of 2*pi. The last row stores 2*pi
/// rather than 0 when the partial sum is already a multiple of 2*pi; the two
/// are equivalent inside any cosine.
struct PhaseSequenceSet {
    RowMatrix phases;
    PhaseSetMode mode = PhaseSetMode::kDesigned;
    std::optional<DesignInfo> design;

    int slots() const { return phases.rows; }
    int units() const { return phases.cols; }
    double at(int slot, int unit) const { return phases.at(slot, unit); }

    /// max_j |(sum_i phi_j^i) mod 2*pi| distance from a multiple of 2*pi.
    double max_closure_defect() const;

    /// Checks the mode-specific alphabet and the closure invariant
    /// (defect <= 1e-12). Throws std::invalid_argument on violation.
    void validate() const;
};

/// Result of the greedy shift search. `offsets` always has the requested
/// size; when `subset_xor_free` is false the tail past `independent_rank`
/// was filled with the next unused offsets and some nonempty subset of the
/// selected sequences XORs to zero.
struct ShiftSelection {
    std::vector<int> offsets;
    int independent_rank = 0;
    bool subset_xor_free = true;
};

/// Runs the LFSR defined by `poly` from `seed` for one full period and
/// returns the 2^n - 1 output bits. Throws std::invalid_argument on a zero
/// seed and NonPrimitivePolynomialError if the state orbit closes early.
MSequence lfsr_generate(const GeneratorPolynomial& poly, std::uint32_t seed);

/// All 2^n - 1 cyclic shifts of `seq`, pairwise distinct.
std::vector<MSequence> enumerate_shifts(const MSequence& seq);

/// Cyclic rotation by `offset` (bit t of the result is bit (t+offset) of the
/// input).
MSequence rotate(const MSequence& seq, int offset);

/// Appends a single 0 to even out the counts: 2^(n-1) ones and zeros each.
/// Throws std::invalid_argument if the input does not have the M-sequence
/// weight 2^(n-1) ones / 2^(n-1)-1 zeros.
BalancedCodeSequence balance(const MSequence& seq);

/// Maps codes to four phase values with independent per-code occurrence
/// counters: the k-th 0 becomes 0 (k odd) or pi (k even); the k-th 1 becomes
/// pi/2 (k odd) or 3*pi/2 (k even). Doubling any output phase mod 2*pi
/// recovers pi times the code, which is what the cross-term cancellation
/// argument consumes.
std::vector<double> codes_to_phases(const BalancedCodeSequence& codes);

/// Row N of the phase matrix: phi_j^N = 2*pi - (sum_{i<N} phi_j^i mod 2*pi).
/// `rows` holds the first N-1 rows. Requires at least one row with finite
/// entries.
std::vector<double> closure_sequence(const RowMatrix& rows);

/// Deterministic lexicographic search for `count` shift offsets whose
/// sequences are subset-XOR-free (equivalently, GF(2)-linearly independent;
/// a nonempty zero-XOR subset is exactly a linear dependency). Greedy over a
/// linear matroid returns the lexicographically smallest feasible selection.
/// Throws InfeasibleSelectionError when fewer than `count` independent shifts
/// exist.
std::vector<int> select_shifts(const MSequence& seq, int count);

/// Same search but never throws: when independence runs out, fills the
/// remaining slots with the smallest unused offsets and reports the achieved
/// rank. Used to reproduce configurations whose strict selection is
/// infeasible, with the degradation recorded in the result.
ShiftSelection select_shifts_best_effort(const MSequence& seq, int count);

/// Designed phase set: rows 1..N-1 from select_shifts -> balance ->
/// codes_to_phases, row N from closure_sequence. M = 2^n columns.
/// Propagates InfeasibleSelectionError from the strict shift search.
PhaseSequenceSet build_phase_set(const GeneratorPolynomial& poly, int slots,
                                 std::uint32_t lfsr_seed = 1);

/// As build_phase_set but with select_shifts_best_effort; never infeasible.
PhaseSequenceSet build_phase_set_best_effort(const GeneratorPolynomial& poly, int slots,
                                             std::uint32_t lfsr_seed = 1);

/// Uniform-random mode: rows 1..N-1 i.i.d. uniform in [0, 2*pi), row N from
/// closure_sequence. Deterministic in `seed`.
PhaseSequenceSet random_phase_set(int slots, int units, std::uint64_t seed);

}  // namespace rpmi
