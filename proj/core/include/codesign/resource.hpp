// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

namespace codesign {

// Usage per FPGA resource class. BRAM is tracked in kilobits, the rest in
// element counts. Addition and ordering are component-wise; the order is
// partial (a <= b only when every component is <=).
struct ResourceVector {
    double dsp = 0.0;
    double lut = 0.0;
    double ff = 0.0;
    double bram_kbit = 0.0;

    ResourceVector& operator+=(const ResourceVector& o) {
        dsp += o.dsp;
        lut += o.lut;
        ff += o.ff;
        bram_kbit += o.bram_kbit;
        return *this;
    }
    friend ResourceVector operator+(ResourceVector a, const ResourceVector& b) { return a += b; }

    friend ResourceVector operator*(double k, const ResourceVector& v) {
        return {k * v.dsp, k * v.lut, k * v.ff, k * v.bram_kbit};
    }

    bool all_leq(const ResourceVector& o) const {
        return dsp <= o.dsp && lut <= o.lut && ff <= o.ff && bram_kbit <= o.bram_kbit;
    }
    bool all_lt(const ResourceVector& o) const {
        return dsp < o.dsp && lut < o.lut && ff < o.ff && bram_kbit < o.bram_kbit;
    }
    bool all_nonneg() const { return dsp >= 0 && lut >= 0 && ff >= 0 && bram_kbit >= 0; }

    bool operator==(const ResourceVector& o) const = default;
};

// Name of the first component of `use` that exceeds `budget`, or "" if none.
// Check order: dsp, lut, ff, bram.
std::string first_overflow(const ResourceVector& use, const ResourceVector& budget);

} // namespace codesign
