#include "distortion/words.hpp"

#include <algorithm>

namespace distortion {

Word::Word(std::vector<Letter> letters) : letters_(std::move(letters)) {
  for (const auto& l : letters_) {
    if (l.exp != 1 && l.exp != -1)
      throw DomainError("letter exponent must be +1 or -1");
    if (l.gen.empty()) throw DomainError("generator name must be non-empty");
  }
}

Word Word::of(std::initializer_list<const char*> names) {
  std::vector<Letter> ls;
  for (const char* n : names) ls.push_back({n, 1});
  return Word(std::move(ls));
}

Word Word::letter(std::string gen, int exp) {
  return Word({Letter{std::move(gen), exp}});
}

Word Word::inverse() const {
  Word out;
  out.letters_.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it)
    out.letters_.push_back(it->inverse());
  return out;
}

Word operator*(const Word& u, const Word& v) {
  Word out = u;
  out.letters_.insert(out.letters_.end(), v.letters_.begin(), v.letters_.end());
  return out;
}

Word Word::repeated(long k) const {
  const Word base = k < 0 ? inverse() : *this;
  Word out;
  for (long i = 0; i < std::labs(k); ++i)
    out.letters_.insert(out.letters_.end(), base.letters_.begin(), base.letters_.end());
  return out;
}

Word reduce(const Word& w) {
  std::vector<Letter> stack;
  stack.reserve(w.size());
  for (const auto& l : w.letters()) {
    if (!stack.empty() && stack.back().gen == l.gen && stack.back().exp == -l.exp)
      stack.pop_back();
    else
      stack.push_back(l);
  }
  return Word(std::move(stack));
}

Word commutator(const Word& u, const Word& v) {
  return reduce(u * v * u.inverse() * v.inverse());
}

void Assignment::bind(const std::string& name, MapExpr map) {
  if (name.empty()) throw DomainError("generator name must be non-empty");
  if (map.dim() != 0) {
    if (dim_ == 0) dim_ = map.dim();
    if (map.dim() != dim_)
      throw DimensionError("generator '" + name + "' has dimension " +
                           std::to_string(map.dim()) + ", assignment has " +
                           std::to_string(dim_));
  }
  maps_[name] = std::move(map);
}

void Assignment::merge(const Assignment& other) {
  for (const auto& [name, m] : other.maps_) {
    if (contains(name)) throw DomainError("generator '" + name + "' bound twice");
    bind(name, m);
  }
}

const MapExpr& Assignment::at(const std::string& name) const {
  auto it = maps_.find(name);
  if (it == maps_.end()) throw UnboundGeneratorError("unbound generator '" + name + "'");
  return it->second;
}

std::vector<std::string> Assignment::names() const {
  std::vector<std::string> out;
  for (const auto& kv : maps_) out.push_back(kv.first);
  return out;
}

BoundWord::BoundWord(const Word& w, const Assignment& asg) {
  steps_.reserve(w.size());
  for (const auto& l : w.letters()) steps_.emplace_back(asg.at(l.gen), l.exp);
}

Point BoundWord::apply(const Point& x) const {
  Point y = x;
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it)
    y = it->second > 0 ? it->first.apply(y) : it->first.apply_inverse(y);
  return y;
}

Point BoundWord::apply_inverse(const Point& y) const {
  Point x = y;
  for (const auto& [m, e] : steps_) x = e > 0 ? m.apply_inverse(x) : m.apply(x);
  return x;
}

MapExpr BoundWord::as_map() const {
  std::vector<MapExpr> ms;
  for (const auto& [m, e] : steps_) ms.push_back(e > 0 ? m : inverse(m));
  return compose(std::move(ms));
}

Point evaluate_word(const Word& w, const Assignment& asg, const Point& x) {
  if (asg.dim() != 0 && x.dim() != asg.dim())
    throw DimensionError("point dimension does not match the assignment");
  return BoundWord(w, asg).apply(x);
}

std::vector<RatioRow> length_ratio_table(
    const std::vector<std::pair<long, Word>>& powers) {
  std::vector<RatioRow> rows;
  for (const auto& [p, w] : powers) {
    if (p <= 0) throw DomainError("powers must be positive");
    if (!rows.empty() && p <= rows.back().p)
      throw DomainError("powers must be strictly increasing");
    rows.push_back({p, w.size(), static_cast<double>(w.size()) / static_cast<double>(p)});
  }
  return rows;
}

Json word_to_json(const Word& w) {
  Json out = Json::array();
  for (const auto& l : w.letters()) out.push_back(Json{{"gen", l.gen}, {"exp", l.exp}});
  return out;
}

Word word_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": word must be an array");
  std::vector<Letter> ls;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& e = j[i];
    std::string w = where + "/" + std::to_string(i);
    if (!e.is_object() || !e.contains("gen") || !e.contains("exp") ||
        !e["gen"].is_string() || !e["exp"].is_number_integer())
      throw ParseError(w + ": letter must be {\"gen\": name, \"exp\": +-1}");
    int exp = e["exp"].get<int>();
    if (exp != 1 && exp != -1) throw ParseError(w + ": exponent must be +1 or -1");
    ls.push_back({e["gen"].get<std::string>(), exp});
  }
  return Word(std::move(ls));
}

std::string to_string(const Word& w) {
  std::string s;
  for (const auto& l : w.letters()) {
    if (!s.empty()) s += ' ';
    s += l.gen;
    if (l.exp < 0) s += "^-1";
  }
  return s;
}

}  // namespace distortion
