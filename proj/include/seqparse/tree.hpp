#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace seqparse {

// A constituency tree. A node with no children is a preterminal: `label`
// holds its POS tag and `word` the terminal it dominates. Internal nodes
// have at least one child and an empty `word`.
struct ParseTree {
  std::string label;
  std::string word;
  std::vector<ParseTree> children;

  static ParseTree preterminal(std::string tag, std::string word);
  static ParseTree internal(std::string label, std::vector<ParseTree> children);

  bool is_preterminal() const { return children.empty(); }
  bool operator==(const ParseTree&) const = default;
};

// Throws std::invalid_argument if the tree violates the structural invariants.
void validate(const ParseTree& t);

std::vector<std::string> words(const ParseTree& t);
std::size_t word_count(const ParseTree& t);

// Replaces every POS tag with "XX".
ParseTree normalize_pos(const ParseTree& t);

inline constexpr std::string_view kNormalizedTag = "XX";

// --- bracketed text ---------------------------------------------------------

class TreeParseError : public std::runtime_error {
 public:
  TreeParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Reads zero or more trees. A wrapper node with an empty label and a single
// child, as in "( (S ...) )", is unwrapped.
std::vector<ParseTree> read_bracketed(std::string_view text);
ParseTree read_one_bracketed(std::string_view text);
std::string write_bracketed(const ParseTree& t);

// --- linearization ----------------------------------------------------------

struct LinearSymbol {
  enum class Kind { kOpen, kClose, kPreterm, kEnd };
  Kind kind = Kind::kEnd;
  std::string label;

  static LinearSymbol open(std::string label) { return {Kind::kOpen, std::move(label)}; }
  static LinearSymbol close(std::string label) { return {Kind::kClose, std::move(label)}; }
  static LinearSymbol preterm(std::string tag) { return {Kind::kPreterm, std::move(tag)}; }
  static LinearSymbol end() { return {Kind::kEnd, {}}; }

  bool operator==(const LinearSymbol&) const = default;
};

inline constexpr std::string_view kEndToken = "END";

// "(S", ")S", "XX", "END"
std::string to_string(const LinearSymbol& s);
LinearSymbol symbol_from_string(std::string_view token);
std::string join_symbols(const std::vector<LinearSymbol>& symbols);
std::vector<LinearSymbol> split_symbols(std::string_view line);

class MalformedSequence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArityMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Depth-first: Open(label) children Close(label); preterminals emit their tag
// only. The result ends with End.
std::vector<LinearSymbol> linearize(const ParseTree& t);

// Inverse of linearize given the sentence words. A trailing End is accepted.
ParseTree delinearize(const std::vector<LinearSymbol>& symbols,
                      const std::vector<std::string>& words);

// True when `symbols` (End ignored) describes exactly one well-formed tree.
bool is_well_formed(const std::vector<LinearSymbol>& symbols);

std::size_t preterm_count(const std::vector<LinearSymbol>& symbols);

// Balances any symbol sequence. Everything from the first End on is dropped,
// closes that do not match the innermost open are dropped, and still-open
// labels are closed at the end, innermost first. Balanced input comes back
// unchanged.
std::vector<LinearSymbol> repair(const std::vector<LinearSymbol>& symbols);

// Turns a balanced sequence into a single tree shape: empty constituents are
// removed, and several top-level items (or a bare top-level preterminal) are
// wrapped in a constituent labelled like the first top-level constituent, or
// `fallback_root` when there is none. Preterm symbols are kept.
std::vector<LinearSymbol> single_root(const std::vector<LinearSymbol>& balanced,
                                      std::string_view fallback_root = "S");

}  // namespace seqparse
