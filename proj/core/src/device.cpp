// SPDX-License-Identifier: Apache-2.0
#include "codesign/device.hpp"

#include "codesign/errors.hpp"

namespace codesign {

void validate(const DeviceSpec& d) {
    if (d.budget.dsp <= 0 || d.budget.lut <= 0 || d.budget.ff <= 0 || d.budget.bram_kbit <= 0) {
        throw DomainError("device '" + d.name + "': every resource budget must be positive");
    }
    if (d.clock_mhz <= 0) throw DomainError("device clock must be positive");
    if (d.bw_bytes_per_cycle <= 0) throw DomainError("device bandwidth must be positive");
}

DeviceSpec pynq_z1() {
    DeviceSpec d;
    d.name = "pynq-z1";
    d.budget = ResourceVector{220, 53200, 106400, 4900};
    d.clock_mhz = 100.0;
    d.bw_bytes_per_cycle = 16.0;
    return d;
}

} // namespace codesign
