#pragma once
// Turning a strip packer into an online sorter.

#include "fanpack/errors.hpp"
#include "fanpack/geometry.hpp"
#include "fanpack/sorting.hpp"
#include "fanpack/strip.hpp"

#include <memory>
#include <string>
#include <vector>

namespace fanpack {

// Parallelogram of height 1, base 1/n and shear s, bottom-left at the origin.
inline HorizontalParallelogram liftReal(const Rat& s, size_t n) {
    if (s.sign() < 0 || Rat(1) < s) throw InputError("liftReal: s must lie in [0,1]");
    if (n == 0) throw InputError("liftReal: n must be positive");
    return {{Rat(0), Rat(0)}, Rat(1, static_cast<int64_t>(n)), s, Rat(1)};
}

struct ReductionStep {
    Rat s, x;
    size_t cell;
};

// Feeds each real to a packer as a lifted parallelogram and stores it in cell
// floor(n x) of a growing array, x being the bottom-left corner chosen.
class PackerSorter : public Sorter {
public:
    PackerSorter(std::unique_ptr<StripPacker> packer, size_t n)
        : packer_(std::move(packer)), n_(n), arr_(n, n) {}

    size_t place(const Rat& s) override {
        Placement pl = packer_->place(liftReal(s, n_).toPiece());
        Rat x = pl.dx;  // the lifted piece's bottom-left corner starts at the origin
        if (x.sign() < 0) throw InvariantViolation("packer placed a piece left of the strip");
        int64_t c = (x * Rat(static_cast<int64_t>(n_))).floorInt();
        size_t cell = static_cast<size_t>(c);
        if (cell >= arr_.capacity()) arr_.grow(cell + 1);
        if (arr_.filled(cell))
            throw InvariantViolation("reduction collision at cell " + std::to_string(cell) + ": packing invalid");
        arr_.place(cell, s);
        steps_.push_back({s, x, cell});
        maxCell_ = std::max(maxCell_, cell);
        return cell;
    }
    const SortArray& array() const override { return arr_; }
    std::string name() const override { return "reduce-" + packer_->name(); }

    const StripPacker& packer() const { return *packer_; }
    const std::vector<ReductionStep>& steps() const { return steps_; }
    // (max cell + 1) / n
    Rat realizedGamma() const {
        if (steps_.empty()) return Rat(0);
        return Rat(static_cast<int64_t>(maxCell_ + 1), static_cast<int64_t>(n_));
    }
    // Left-to-right order of the placed reals.
    std::vector<Rat> order() const { return arr_.filledValues(); }

private:
    std::unique_ptr<StripPacker> packer_;
    size_t n_;
    SortArray arr_;
    std::vector<ReductionStep> steps_;
    size_t maxCell_ = 0;
};

struct GapCertificate {
    Rat cost, width;
    bool holds = false;
};

// Occupied width must be at least half the cost of the induced order.
inline GapCertificate gapCertificate(const PackerSorter& run) {
    GapCertificate g;
    g.cost = totalCost(run.array());
    g.width = run.packer().occupiedWidth();
    g.holds = !(g.width * Rat(2) < g.cost);
    return g;
}

}  // namespace fanpack
