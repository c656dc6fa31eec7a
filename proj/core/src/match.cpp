#include "semflow/match.hpp"

#include <functional>

namespace semflow {

namespace {

// Does t fall within match type mt, viewed as a set of terms?
bool fits(const TermPtr& t, MatchType mt) {
  if (mt == MatchType::All) return true;
  if (mt == MatchType::Val)
    return t->is_value_term() ||
           ((t->kind == Term::Kind::Star || t->kind == Term::Kind::Var) && t->mt == MatchType::Val);
  return t->is_nonvalue_term() ||
         ((t->kind == Term::Kind::Star || t->kind == Term::Kind::Var) && t->mt == MatchType::NonVal);
}

// Restrict a subject to the pattern variable's match type, producing the
// witness fragment it binds (a star subject narrows to the variable's type).
std::optional<TermPtr> restrict_to(const TermPtr& subject, MatchType mt, bool abstract_mode) {
  if (mt == MatchType::All) return subject;
  if (fits(subject, mt)) return subject;
  if (abstract_mode && subject->kind == Term::Kind::Star && subject->mt == MatchType::All)
    return star(mt);
  return std::nullopt;
}

bool bind_term(const VarKey& k, const TermPtr& value, Substitution& s) {
  auto it = s.terms.find(k);
  if (it == s.terms.end()) {
    s.terms[k] = value;
    return true;
  }
  auto m = meet(it->second, value);
  if (!m) return false;
  it->second = *m;
  return true;
}

bool node_kind_fits_star(const TermPtr& node, MatchType mt) {
  if (node->kind == Term::Kind::ValNode || node->is_const())
    return mt == MatchType::Val || mt == MatchType::All;
  return mt == MatchType::NonVal || mt == MatchType::All;
}

}  // namespace

bool match_term_into(const TermPtr& pattern, const TermPtr& subject, Substitution& s,
                     bool abstract_mode) {
  switch (pattern->kind) {
    case Term::Kind::Var: {
      auto frag = restrict_to(subject, pattern->mt, abstract_mode);
      if (!frag) return false;
      return bind_term(key_of(pattern), *frag, s);
    }
    case Term::Kind::Star:
      // Patterns normally carry variables, not stars; fall back to ordering.
      return prec_leq(subject, pattern);
    case Term::Kind::ConstInt:
    case Term::Kind::ConstStr:
      if (term_eq(pattern, subject)) return true;
      return abstract_mode && subject->kind == Term::Kind::Star &&
             node_kind_fits_star(pattern, subject->mt);
    default: {  // node patterns
      if (subject->is_node()) {
        if (subject->kind != pattern->kind || subject->sym != pattern->sym ||
            subject->children.size() != pattern->children.size())
          return false;
        for (std::size_t i = 0; i < pattern->children.size(); ++i)
          if (!match_term_into(pattern->children[i], subject->children[i], s, abstract_mode))
            return false;
        return true;
      }
      if (abstract_mode && subject->kind == Term::Kind::Star &&
          node_kind_fits_star(pattern, subject->mt)) {
        // Some concretization of the star matches; bind the fragment's
        // variables to stars of their own match types.
        TermPtr any = star(MatchType::All);
        for (const auto& c : pattern->children)
          if (!match_term_into(c, any, s, true)) return false;
        return true;
      }
      return false;
    }
  }
}

bool match_state_into(const ReductionState& pattern, const ReductionState& subject,
                      Substitution& s, bool abstract_mode) {
  std::vector<bool> consumed(subject.bindings.size(), false);
  for (const auto& [kp, vp] : pattern.bindings) {
    TermPtr k = substitute(s, kp);
    if (term_has_var(k)) throw KeyNotGround(print_term(k));
    bool found = false;
    for (std::size_t i = 0; i < subject.bindings.size(); ++i) {
      if (consumed[i]) continue;
      if (term_eq(subject.bindings[i].first, k)) {
        if (!match_term_into(vp, subject.bindings[i].second, s, abstract_mode)) return false;
        consumed[i] = true;
        found = true;
        break;
      }
    }
    if (found) continue;
    // The entry may live in the subject's open remainder.
    if (abstract_mode && subject.tail && subject.tail->kind == Term::Kind::Star) {
      if (!match_term_into(vp, star(MatchType::Val), s, true)) return false;
      continue;
    }
    return false;
  }

  ReductionState rest;
  for (std::size_t i = 0; i < subject.bindings.size(); ++i)
    if (!consumed[i]) rest.bindings.push_back(subject.bindings[i]);
  rest.tail = subject.tail;

  if (!pattern.tail) {
    if (!rest.bindings.empty()) return false;
    if (rest.tail && !(abstract_mode && rest.tail->kind == Term::Kind::Star)) return false;
    return true;
  }
  if (pattern.tail->kind == Term::Kind::Star) return true;
  // tail variable absorbs the remainder
  VarKey k = key_of(pattern.tail);
  auto it = s.states.find(k);
  if (it != s.states.end()) return state_eq(it->second, rest);
  s.states[k] = rest;
  return true;
}

bool match_config_into(const Configuration& pattern, const Configuration& subject,
                       Substitution& s, bool abstract_mode) {
  return match_term_into(pattern.term, subject.term, s, abstract_mode) &&
         match_state_into(pattern.state, subject.state, s, abstract_mode);
}

std::optional<Substitution> match(const TermPtr& pattern, const TermPtr& subject) {
  Substitution s;
  if (match_term_into(pattern, subject, s, false)) return s;
  return std::nullopt;
}

std::optional<Substitution> match_state(const ReductionState& pattern,
                                        const ReductionState& subject,
                                        const Substitution& partial) {
  Substitution s = partial;
  if (match_state_into(pattern, subject, s, false)) return s;
  return std::nullopt;
}

std::optional<Substitution> abstract_match(const TermPtr& pattern, const TermPtr& subject) {
  Substitution s;
  if (match_term_into(pattern, subject, s, true)) return s;
  return std::nullopt;
}

// ------------------------------ unification --------------------------------

namespace {

TermPtr walk(const Substitution& s, TermPtr t) {
  while (t->kind == Term::Kind::Var) {
    auto it = s.terms.find(key_of(t));
    if (it == s.terms.end()) break;
    t = it->second;
  }
  return t;
}

bool occurs(const Substitution& s, const VarKey& k, const TermPtr& t) {
  TermPtr u = walk(s, t);
  if (u->kind == Term::Kind::Var) return key_of(u) == k;
  for (const auto& c : u->children)
    if (occurs(s, k, c)) return true;
  return false;
}

bool bind_for_unify(const VarKey& k, const TermPtr& value, Substitution& s) {
  if (occurs(s, k, value)) return false;
  s.terms[k] = value;
  return true;
}

}  // namespace

bool unify_into(const TermPtr& ta, const TermPtr& tb, Substitution& s, FreshCounter& fc) {
  TermPtr a = walk(s, ta);
  TermPtr b = walk(s, tb);
  if (a->kind == Term::Kind::Var && b->kind == Term::Kind::Var && key_of(a) == key_of(b))
    return true;
  if (a->kind == Term::Kind::Var || b->kind == Term::Kind::Var) {
    if (b->kind == Term::Kind::Var && a->kind != Term::Kind::Var) std::swap(a, b);
    // a is a variable
    if (b->kind == Term::Kind::Var) {
      auto m = mt_meet(a->mt, b->mt);
      if (!m) return false;
      if (*m == b->mt) return bind_for_unify(key_of(a), b, s);
      if (*m == a->mt) return bind_for_unify(key_of(b), a, s);
      return false;  // unreachable: meet is always one of the two
    }
    if (b->kind == Term::Kind::Star) {
      auto m = mt_meet(a->mt, b->mt);
      if (!m) return false;
      return bind_for_unify(key_of(a), star(*m), s);
    }
    if (!fits(b, a->mt) && a->mt != MatchType::All) {
      // b is a node/const: its kind must fall in a's match type
      if (b->is_value_term() && a->mt != MatchType::Val) return false;
      if (b->is_nonvalue_term() && a->mt != MatchType::NonVal) return false;
    }
    return bind_for_unify(key_of(a), b, s);
  }
  if (a->kind == Term::Kind::Star || b->kind == Term::Kind::Star) {
    if (b->kind == Term::Kind::Star && a->kind != Term::Kind::Star) std::swap(a, b);
    // a is a star
    if (b->kind == Term::Kind::Star) return mt_meet(a->mt, b->mt).has_value();
    if (!node_kind_fits_star(b, a->mt)) return false;
    TermPtr any = star(MatchType::All);
    for (const auto& c : b->children)
      if (!unify_into(any, c, s, fc)) return false;
    return true;
  }
  if (a->is_const() || b->is_const()) return term_eq(a, b);
  if (a->kind != b->kind || a->sym != b->sym || a->children.size() != b->children.size())
    return false;
  for (std::size_t i = 0; i < a->children.size(); ++i)
    if (!unify_into(a->children[i], b->children[i], s, fc)) return false;
  return true;
}

bool unify_state_into(const ReductionState& sa, const ReductionState& sb, Substitution& s,
                      FreshCounter& fc) {
  ReductionState a = substitute(s, sa);
  ReductionState b = substitute(s, sb);

  std::vector<bool> bconsumed(b.bindings.size(), false);
  std::vector<std::pair<TermPtr, TermPtr>> a_only;
  for (const auto& [ka, va] : a.bindings) {
    TermPtr k = substitute(s, ka);
    bool found = false;
    for (std::size_t i = 0; i < b.bindings.size(); ++i) {
      if (bconsumed[i]) continue;
      if (term_eq(substitute(s, b.bindings[i].first), k)) {
        if (!unify_into(va, b.bindings[i].second, s, fc)) return false;
        bconsumed[i] = true;
        found = true;
        break;
      }
    }
    if (!found) a_only.emplace_back(k, va);
  }
  std::vector<std::pair<TermPtr, TermPtr>> b_only;
  for (std::size_t i = 0; i < b.bindings.size(); ++i)
    if (!bconsumed[i]) b_only.push_back(b.bindings[i]);

  TermPtr ta = a.tail, tb = b.tail;
  auto is_var = [](const TermPtr& t) { return t && t->kind == Term::Kind::Var; };
  auto is_star = [](const TermPtr& t) { return t && t->kind == Term::Kind::Star; };

  // Leftover entries on one side must be absorbed by the other side's tail.
  if (!b_only.empty() && !ta) return false;
  if (!a_only.empty() && !tb) return false;

  if (is_var(ta) && is_var(tb)) {
    if (key_of(ta) == key_of(tb)) {
      if (!(a_only.empty() && b_only.empty())) return false;
      return true;
    }
    TermPtr rest = var("rest", MatchType::All, fc.next());
    ReductionState va;
    va.bindings = b_only;
    va.tail = rest;
    ReductionState vb;
    vb.bindings = a_only;
    vb.tail = rest;
    s.states[key_of(ta)] = va;
    s.states[key_of(tb)] = vb;
    return true;
  }
  if (is_var(ta)) {
    ReductionState va;
    va.bindings = b_only;
    va.tail = tb;  // null or star
    s.states[key_of(ta)] = va;
    return true;
  }
  if (is_var(tb)) {
    ReductionState vb;
    vb.bindings = a_only;
    vb.tail = ta;
    s.states[key_of(tb)] = vb;
    return true;
  }
  // No variables: stars absorb, null requires emptiness.
  if (!ta && !b_only.empty()) return false;
  if (!tb && !a_only.empty()) return false;
  if (is_star(ta) || is_star(tb)) return true;
  return ta == nullptr && tb == nullptr;
}

bool unify_config_into(const Configuration& a, const Configuration& b, Substitution& s,
                       FreshCounter& fc) {
  return unify_into(a.term, b.term, s, fc) && unify_state_into(a.state, b.state, s, fc);
}

std::optional<Substitution> unify(const TermPtr& a, const TermPtr& b) {
  Substitution s;
  FreshCounter fc;
  if (!unify_into(a, b, s, fc)) return std::nullopt;
  // normalize: resolve chains so the result is idempotent
  bool changed = true;
  int guard = 0;
  while (changed && guard++ < 64) {
    changed = false;
    for (auto& [k, v] : s.terms) {
      TermPtr nv = substitute(s, v);
      if (!term_eq(nv, v)) {
        v = nv;
        changed = true;
      }
    }
  }
  return s;
}

// ------------------------------ ordering -----------------------------------

bool prec_leq(const TermPtr& t1, const TermPtr& t2) {
  if (term_eq(t1, t2)) return true;
  switch (t2->kind) {
    case Term::Kind::Star:
    case Term::Kind::Var:
      return fits(t1, t2->mt);
    case Term::Kind::NonValNode:
    case Term::Kind::ValNode: {
      if (t1->kind != t2->kind || t1->sym != t2->sym ||
          t1->children.size() != t2->children.size())
        return false;
      for (std::size_t i = 0; i < t1->children.size(); ++i)
        if (!prec_leq(t1->children[i], t2->children[i])) return false;
      return true;
    }
    default:
      return false;
  }
}

bool prec_leq(const ReductionState& a, const ReductionState& b) {
  // Every explicit entry of b must be explicitly at-or-above in a.
  for (const auto& [k, vb] : b.bindings) {
    auto va = a.lookup(k);
    if (!va || !prec_leq(*va, vb)) return false;
  }
  // Every extra entry of a must be absorbed by b's tail.
  for (const auto& [k, va] : a.bindings) {
    if (b.lookup(k)) continue;
    if (!b.tail) return false;
    if (b.tail->kind == Term::Kind::Star && b.tail->mt != MatchType::All) return false;
  }
  if (!a.tail) return true;
  if (!b.tail) return false;
  return prec_leq(a.tail, b.tail);
}

bool prec_leq(const Configuration& a, const Configuration& b) {
  return prec_leq(a.term, b.term) && prec_leq(a.state, b.state);
}

// ------------------------------ join / meet --------------------------------

namespace {

bool value_ish(const TermPtr& t) {
  return t->is_value_term() || (t->kind == Term::Kind::Star && t->mt == MatchType::Val);
}
bool nonval_ish(const TermPtr& t) {
  return t->is_nonvalue_term() || (t->kind == Term::Kind::Star && t->mt == MatchType::NonVal);
}

}  // namespace

TermPtr join(const TermPtr& t1, const TermPtr& t2) {
  if (term_eq(t1, t2)) return t1;
  // values are atomic under the join: differing values go straight to *val
  if (t1->kind == Term::Kind::NonValNode && t2->kind == Term::Kind::NonValNode &&
      t1->sym == t2->sym && t1->children.size() == t2->children.size()) {
    std::vector<TermPtr> kids;
    kids.reserve(t1->children.size());
    for (std::size_t i = 0; i < t1->children.size(); ++i)
      kids.push_back(join(t1->children[i], t2->children[i]));
    return nonval(t1->sym, std::move(kids));
  }
  if (value_ish(t1) && value_ish(t2)) return star(MatchType::Val);
  if (nonval_ish(t1) && nonval_ish(t2)) return star(MatchType::NonVal);
  return star(MatchType::All);
}

ReductionState join(const ReductionState& a, const ReductionState& b) {
  ReductionState out;
  bool dropped = false;
  for (const auto& [k, va] : a.bindings) {
    auto vb = b.lookup(k);
    if (vb)
      out.upd(k, join(va, *vb));
    else
      dropped = true;
  }
  for (const auto& [k, vb] : b.bindings)
    if (!a.lookup(k)) dropped = true;
  if (dropped || a.tail || b.tail) {
    if (!dropped && a.tail && b.tail && term_eq(a.tail, b.tail))
      out.tail = a.tail;
    else
      out.tail = star(MatchType::All);
  }
  return out;
}

std::optional<TermPtr> meet(const TermPtr& t1, const TermPtr& t2) {
  if (term_eq(t1, t2)) return t1;
  if (t1->kind == Term::Kind::Star) {
    if (t2->kind == Term::Kind::Star) {
      auto m = mt_meet(t1->mt, t2->mt);
      if (!m) return std::nullopt;
      return star(*m);
    }
    if (t2->kind == Term::Kind::Var) {
      auto m = mt_meet(t1->mt, t2->mt);
      if (!m) return std::nullopt;
      return var(t2->sym, *m, t2->tag);
    }
    if (fits(t2, t1->mt) || t1->mt == MatchType::All) return t2;
    return std::nullopt;
  }
  if (t2->kind == Term::Kind::Star) return meet(t2, t1);
  if (t1->kind == Term::Kind::Var) {
    if (t2->kind == Term::Kind::Var) {
      if (t1->sym == t2->sym && t1->tag == t2->tag) {
        auto m = mt_meet(t1->mt, t2->mt);
        if (!m) return std::nullopt;
        return var(t1->sym, *m, t1->tag);
      }
      return std::nullopt;
    }
    if (fits(t2, t1->mt) || t1->mt == MatchType::All) return t2;
    return std::nullopt;
  }
  if (t2->kind == Term::Kind::Var) return meet(t2, t1);
  if (t1->is_node() && t2->is_node() && t1->kind == t2->kind && t1->sym == t2->sym &&
      t1->children.size() == t2->children.size()) {
    std::vector<TermPtr> kids;
    for (std::size_t i = 0; i < t1->children.size(); ++i) {
      auto m = meet(t1->children[i], t2->children[i]);
      if (!m) return std::nullopt;
      kids.push_back(*m);
    }
    return t1->kind == Term::Kind::ValNode ? val(t1->sym, std::move(kids))
                                           : nonval(t1->sym, std::move(kids));
  }
  return std::nullopt;
}

}  // namespace semflow
