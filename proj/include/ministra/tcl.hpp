#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ministra/types.hpp"

namespace ministra {

/// A small Tcl subset: word splitting with {} "" [] rules, $var / ${var} / [cmd] substitution,
/// backslash escapes, and the built-ins set, unset, expr, if, foreach, for, while, break,
/// continue, incr, list, llength, lindex, lappend, lrange, concat, join, puts, return.
class TclInterp {
 public:
  using Command = std::function<std::string(TclInterp&, const std::vector<std::string>&)>;

  TclInterp();

  void register_command(const std::string& name, Command cmd);
  bool has_command(const std::string& name) const { return commands_.count(name) != 0; }

  /// When set, unknown commands call this instead of raising an error.
  std::function<std::string(TclInterp&, const std::vector<std::string>&)> unknown;

  std::string eval(std::string_view script, const std::string& file = "<tcl>");
  std::string eval_expr(std::string_view expr);

  void set_var(const std::string& name, std::string value) { vars_[name] = std::move(value); }
  const std::string* get_var(const std::string& name) const;

  /// Line of the top-level command being evaluated (1-based).
  std::size_t line() const { return line_; }
  const std::string& file() const { return file_; }

  static std::vector<std::string> split_list(std::string_view list);
  static std::string make_list(const std::vector<std::string>& items);
  static std::string quote_element(std::string_view item);

  /// Appended to by `puts`; also forwarded to the log at info level.
  std::vector<std::string> output;

 private:
  friend class TclParser;
  std::string eval_nested(std::string_view script, std::size_t base_offset);
  std::string invoke(std::vector<std::string>& words);

  std::map<std::string, Command> commands_;
  std::map<std::string, std::string> vars_;
  std::string file_;
  std::string_view source_;
  std::size_t line_ = 1;
  int depth_ = 0;
};

/// Tcl-level failure (bad command, bad expression). Carries the script line.
class TclError : public Error {
 public:
  using Error::Error;
};

}  // namespace ministra
