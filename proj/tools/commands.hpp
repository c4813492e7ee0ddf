#ifndef DYNHOMOG_TOOLS_COMMANDS_HPP
#define DYNHOMOG_TOOLS_COMMANDS_HPP

#include <string>

#include "config.hpp"

namespace dynhomog::cli {

struct GlobalOptions {
  int jobs = 0;              // 0: use hardware concurrency
  std::string out_override;  // empty: use config output.directory
};

// Exit codes: 0 ok, 2 config, 3 solver failure, 4 branch not found,
// 5 verification failure.
int cmd_dispersion(const RunConfig& cfg, const GlobalOptions& opts);
int cmd_homogenize(const RunConfig& cfg, const GlobalOptions& opts);
int cmd_fields(const RunConfig& cfg, const GlobalOptions& opts, double qa,
               int branch);
int cmd_verify(const RunConfig& cfg, const GlobalOptions& opts);

}  // namespace dynhomog::cli

#endif
