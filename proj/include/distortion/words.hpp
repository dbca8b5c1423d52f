#pragma once

#include <map>
#include <string>
#include <vector>

#include "distortion/geomaps.hpp"
#include "distortion/map_json.hpp"

namespace distortion {

struct Letter {
  std::string gen;
  int exp = 1;  // +1 or -1

  Letter inverse() const { return {gen, -exp}; }
  friend bool operator==(const Letter&, const Letter&) = default;
};

/// Product of letters; the rightmost letter acts first on points.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters);
  /// Convenience: one letter per name, exponents +1.
  static Word of(std::initializer_list<const char*> names);
  static Word letter(std::string gen, int exp = 1);

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  const std::vector<Letter>& letters() const { return letters_; }

  Word inverse() const;
  /// Unreduced concatenation; (u * v) acts as u o v.
  friend Word operator*(const Word& u, const Word& v);
  /// Unreduced k-fold concatenation (k may be negative).
  Word repeated(long k) const;

  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::vector<Letter> letters_;
};

/// Free reduction (cancels adjacent s s^-1 pairs).
Word reduce(const Word& w);
/// reduce(u v u^-1 v^-1)
Word commutator(const Word& u, const Word& v);

/// Generator name -> map; all maps share one dimension.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(int dim) : dim_(dim) {}

  void bind(const std::string& name, MapExpr map);
  /// Adds every binding of `other` (names must not clash).
  void merge(const Assignment& other);
  bool contains(const std::string& name) const { return maps_.count(name) > 0; }
  const MapExpr& at(const std::string& name) const;
  int dim() const { return dim_; }
  std::vector<std::string> names() const;

 private:
  int dim_ = 0;
  std::map<std::string, MapExpr> maps_;
};

/// Word with generators resolved once; cheap to evaluate on many points.
class BoundWord {
 public:
  BoundWord(const Word& w, const Assignment& asg);
  Point apply(const Point& x) const;
  Point apply_inverse(const Point& y) const;
  /// The same product as a MapExpr (compose of the letters).
  MapExpr as_map() const;

 private:
  std::vector<std::pair<MapExpr, int>> steps_;  // in word order
};

Point evaluate_word(const Word& w, const Assignment& asg, const Point& x);

struct RatioRow {
  long p;
  std::size_t length;
  double ratio;
};

/// Rows (p, |w|, |w|/p) for strictly increasing p.
std::vector<RatioRow> length_ratio_table(
    const std::vector<std::pair<long, Word>>& powers);

Json word_to_json(const Word& w);
Word word_from_json(const Json& j, const std::string& where = "");
std::string to_string(const Word& w);

}  // namespace distortion
