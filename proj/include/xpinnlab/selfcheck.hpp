#pragma once

namespace xpinnlab::selfcheck {

/// Fast internal consistency suite behind `xpinn-lab check`: derivative
/// oracles, norm identities, frozen bound constants, closed-form prior
/// comparisons and round-trip IO. Prints one line per check and returns
/// 0 when everything passes, 3 otherwise.
int run_all();

} // namespace xpinnlab::selfcheck
