#include "maxrefactor/logic.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>
#include <sstream>

namespace maxref {

Rule make_rule(Literal head, std::vector<Literal> body) {
    Rule r;
    r.head = std::move(head);
    for (auto& lit : body) {
        if (std::find(r.body.begin(), r.body.end(), lit) == r.body.end())
            r.body.push_back(std::move(lit));
    }
    // Renumber variables by first occurrence, head first.
    std::map<int, int> remap;
    auto visit = [&](Literal& lit) {
        for (int& v : lit.args) {
            auto it = remap.find(v);
            if (it == remap.end()) {
                int id = static_cast<int>(remap.size());
                remap.emplace(v, id);
                v = id;
            } else {
                v = it->second;
            }
        }
    };
    visit(r.head);
    for (auto& lit : r.body) visit(lit);
    r.var_count = static_cast<int>(remap.size());
    return r;
}

int program_size(const Program& p) {
    int total = 0;
    for (const auto& r : p.rules) total += r.size();
    return total;
}

std::map<std::string, int> body_predicates(const Program& p) {
    std::map<std::string, int> out;
    for (const auto& r : p.rules)
        for (const auto& lit : r.body) out[lit.pred] = lit.arity();
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

ParseError::ParseError(int line, int column, const std::string& msg)
    : std::runtime_error("parse error at " + std::to_string(line) + ":" + std::to_string(column) +
                         ": " + msg),
      line(line),
      column(column) {}

namespace {

struct Token {
    enum Kind { Ident, Var, LParen, RParen, Comma, Dot, Arrow, End } kind;
    std::string text;
    int line, col;
};

class Lexer {
  public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        skipWs();
        Token t{Token::End, "", line_, col_};
        if (pos_ >= text_.size()) return t;
        char c = text_[pos_];
        if (c == '(') return take(Token::LParen, 1);
        if (c == ')') return take(Token::RParen, 1);
        if (c == ',') return take(Token::Comma, 1);
        if (c == '.') return take(Token::Dot, 1);
        if (c == ':') {
            if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') return take(Token::Arrow, 2);
            throw ParseError(line_, col_, "expected ':-'");
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            t.kind = std::isupper(static_cast<unsigned char>(c)) || c == '_' ? Token::Var : Token::Ident;
            size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                advance();
            t.text = std::string(text_.substr(start, pos_ - start));
            return t;
        }
        throw ParseError(line_, col_, std::string("unexpected character '") + c + "'");
    }

  private:
    Token take(Token::Kind k, int len) {
        Token t{k, std::string(text_.substr(pos_, len)), line_, col_};
        for (int i = 0; i < len; ++i) advance();
        return t;
    }
    void skipWs() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '%') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view text_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

class Parser {
  public:
    Parser(std::string_view text, std::vector<std::string>* warnings)
        : lex_(text), warnings_(warnings) {
        cur_ = lex_.next();
    }

    Program parse() {
        Program p;
        while (cur_.kind != Token::End) {
            parseRule(p);
        }
        return p;
    }

  private:
    void parseRule(Program& p) {
        std::map<std::string, int> varTable;
        Literal head = parseLiteral(p, varTable);
        std::vector<Literal> body;
        if (cur_.kind == Token::Arrow) {
            consume();
            body.push_back(parseLiteral(p, varTable));
            while (cur_.kind == Token::Comma) {
                consume();
                body.push_back(parseLiteral(p, varTable));
            }
        }
        expect(Token::Dot, "expected '.' at end of rule");
        // Duplicate body literals collapse (set semantics).
        std::vector<Literal> dedup;
        for (auto& lit : body) {
            if (std::find(dedup.begin(), dedup.end(), lit) != dedup.end()) {
                if (warnings_)
                    warnings_->push_back("duplicate body literal " + to_string(lit) +
                                         " dropped (line " + std::to_string(cur_.line) + ")");
                continue;
            }
            dedup.push_back(std::move(lit));
        }
        p.rules.push_back(make_rule(std::move(head), std::move(dedup)));
    }

    Literal parseLiteral(Program& p, std::map<std::string, int>& varTable) {
        if (cur_.kind == Token::Var)
            throw ParseError(cur_.line, cur_.col, "predicate symbols must start lowercase");
        Token name = expect(Token::Ident, "expected predicate symbol");
        Literal lit;
        lit.pred = name.text;
        if (cur_.kind == Token::LParen) {
            consume();
            for (;;) {
                if (cur_.kind == Token::Ident)
                    throw ParseError(cur_.line, cur_.col,
                                     "constants and function symbols are not supported; "
                                     "arguments must be variables");
                Token v = expect(Token::Var, "expected variable");
                if (cur_.kind == Token::LParen)
                    throw ParseError(cur_.line, cur_.col,
                                     "constants and function symbols are not supported");
                auto it = varTable.find(v.text);
                int id;
                if (it == varTable.end()) {
                    id = static_cast<int>(varTable.size());
                    varTable.emplace(v.text, id);
                } else {
                    id = it->second;
                }
                lit.args.push_back(id);
                if (cur_.kind == Token::Comma) {
                    consume();
                    continue;
                }
                expect(Token::RParen, "expected ')' or ','");
                break;
            }
        }
        auto it = p.predicate_table.find(lit.pred);
        if (it == p.predicate_table.end()) {
            p.predicate_table.emplace(lit.pred, lit.arity());
        } else if (it->second != lit.arity()) {
            throw ParseError(name.line, name.col,
                             "arity mismatch for predicate '" + lit.pred + "': used with arity " +
                                 std::to_string(lit.arity()) + " but previously " +
                                 std::to_string(it->second));
        }
        return lit;
    }

    Token expect(Token::Kind k, const std::string& msg) {
        if (cur_.kind != k) throw ParseError(cur_.line, cur_.col, msg);
        Token t = cur_;
        consume();
        return t;
    }
    void consume() { cur_ = lex_.next(); }

    Lexer lex_;
    Token cur_;
    std::vector<std::string>* warnings_;
};

}  // namespace

Program parse_program(std::string_view text, std::vector<std::string>* warnings) {
    Parser parser(text, warnings);
    return parser.parse();
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string var_name(int id) { return "V" + std::to_string(id); }

void print_literal(std::ostream& os, const Literal& lit, std::map<int, int>& remap) {
    os << lit.pred;
    if (lit.args.empty()) return;
    os << '(';
    for (size_t i = 0; i < lit.args.size(); ++i) {
        if (i) os << ',';
        auto it = remap.find(lit.args[i]);
        if (it == remap.end()) it = remap.emplace(lit.args[i], static_cast<int>(remap.size())).first;
        os << var_name(it->second);
    }
    os << ')';
}

}  // namespace

std::string to_string(const Literal& lit) {
    std::ostringstream os;
    std::map<int, int> remap;
    print_literal(os, lit, remap);
    return os.str();
}

std::string to_string(const Rule& r) {
    std::ostringstream os;
    std::map<int, int> remap;
    print_literal(os, r.head, remap);
    if (!r.body.empty()) {
        os << " :- ";
        for (size_t i = 0; i < r.body.size(); ++i) {
            if (i) os << ", ";
            print_literal(os, r.body[i], remap);
        }
    }
    os << '.';
    return os.str();
}

std::string to_string(const Program& p) {
    std::string out;
    for (const auto& r : p.rules) {
        out += to_string(r);
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Alpha equivalence

namespace {

struct VarMatch {
    std::vector<int> fwd, bwd;
    VarMatch(int n, int m) : fwd(n, -1), bwd(m, -1) {}
    bool bind(int a, int b) {
        if (fwd[a] == -1 && bwd[b] == -1) {
            fwd[a] = b;
            bwd[b] = a;
            return true;
        }
        return fwd[a] == b;
    }
};

bool match_literal(const Literal& a, const Literal& b, VarMatch& m, std::vector<std::pair<int, int>>& trail) {
    if (a.pred != b.pred || a.args.size() != b.args.size()) return false;
    size_t mark = trail.size();
    for (size_t i = 0; i < a.args.size(); ++i) {
        int x = a.args[i], y = b.args[i];
        if (m.fwd[x] == -1 && m.bwd[y] == -1) {
            m.fwd[x] = y;
            m.bwd[y] = x;
            trail.emplace_back(x, y);
        } else if (m.fwd[x] != y) {
            while (trail.size() > mark) {
                auto [px, py] = trail.back();
                trail.pop_back();
                m.fwd[px] = -1;
                m.bwd[py] = -1;
            }
            return false;
        }
    }
    return true;
}

bool match_body(const Rule& a, const Rule& b, size_t i, VarMatch& m, std::vector<bool>& used,
                std::vector<std::pair<int, int>>& trail) {
    if (i == a.body.size()) return true;
    for (size_t j = 0; j < b.body.size(); ++j) {
        if (used[j]) continue;
        size_t mark = trail.size();
        if (match_literal(a.body[i], b.body[j], m, trail)) {
            used[j] = true;
            if (match_body(a, b, i + 1, m, used, trail)) return true;
            used[j] = false;
        }
        while (trail.size() > mark) {
            auto [px, py] = trail.back();
            trail.pop_back();
            m.fwd[px] = -1;
            m.bwd[py] = -1;
        }
    }
    return false;
}

std::string rule_signature(const Rule& r) {
    std::ostringstream os;
    os << r.head.pred << '/' << r.head.args.size() << '#' << r.body.size() << '#' << r.var_count << '#';
    std::multiset<std::string> preds;
    for (const auto& l : r.body) preds.insert(l.pred + "/" + std::to_string(l.args.size()));
    for (const auto& s : preds) os << s << ';';
    return os.str();
}

bool match_programs(const std::vector<const Rule*>& as, const std::vector<const Rule*>& bs, size_t i,
                    std::vector<bool>& used) {
    if (i == as.size()) return true;
    for (size_t j = 0; j < bs.size(); ++j) {
        if (used[j]) continue;
        if (rules_alpha_equal(*as[i], *bs[j])) {
            used[j] = true;
            if (match_programs(as, bs, i + 1, used)) return true;
            used[j] = false;
        }
    }
    return false;
}

}  // namespace

bool rules_alpha_equal(const Rule& a, const Rule& b) {
    if (a.body.size() != b.body.size() || a.var_count != b.var_count) return false;
    VarMatch m(a.var_count, b.var_count);
    std::vector<std::pair<int, int>> trail;
    if (!match_literal(a.head, b.head, m, trail)) return false;
    std::vector<bool> used(b.body.size(), false);
    return match_body(a, b, 0, m, used, trail);
}

bool alpha_equal(const Program& a, const Program& b) {
    if (a.rules.size() != b.rules.size()) return false;
    std::map<std::string, std::pair<std::vector<const Rule*>, std::vector<const Rule*>>> groups;
    for (const auto& r : a.rules) groups[rule_signature(r)].first.push_back(&r);
    for (const auto& r : b.rules) groups[rule_signature(r)].second.push_back(&r);
    for (auto& [sig, g] : groups) {
        if (g.first.size() != g.second.size()) return false;
        std::vector<bool> used(g.second.size(), false);
        if (!match_programs(g.first, g.second, 0, used)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Unfolding

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

Program unfold(const Program& p, const Rule& r) {
    std::set<int> headVars(r.head.args.begin(), r.head.args.end());
    for (const auto& lit : r.body)
        for (int v : lit.args)
            if (!headVars.count(v))
                throw std::invalid_argument("cannot unfold upon a rule with a variable that only "
                                            "appears in its body: " +
                                            to_string(r));

    Program out;
    out.predicate_table = p.predicate_table;
    out.predicate_table.erase(r.head.pred);
    for (const auto& c : p.rules) {
        std::vector<size_t> occ;
        for (size_t i = 0; i < c.body.size(); ++i)
            if (c.body[i].pred == r.head.pred) occ.push_back(i);
        if (occ.empty()) {
            out.rules.push_back(c);
            continue;
        }
        // Variable space: c's variables, then one fresh copy of r's
        // variables per occurrence.
        int n = static_cast<int>(occ.size());
        UnionFind uf(c.var_count + n * r.var_count);
        auto copyVar = [&](int i, int v) { return c.var_count + i * r.var_count + v; };
        for (int i = 0; i < n; ++i) {
            const Literal& at = c.body[occ[i]];
            if (at.args.size() != r.head.args.size())
                throw std::invalid_argument("arity mismatch while unfolding " + to_string(r));
            for (size_t j = 0; j < at.args.size(); ++j)
                uf.unite(at.args[j], copyVar(i, r.head.args[j]));
        }
        auto mapped = [&](const Literal& lit, int copy) {
            Literal m = lit;
            for (int& v : m.args) v = uf.find(copy < 0 ? v : copyVar(copy, v));
            return m;
        };
        Literal head = mapped(c.head, -1);
        std::vector<Literal> body;
        size_t oi = 0;
        for (size_t i = 0; i < c.body.size(); ++i) {
            if (oi < occ.size() && occ[oi] == i) {
                ++oi;
                continue;
            }
            body.push_back(mapped(c.body[i], -1));
        }
        for (int i = 0; i < n; ++i)
            for (const auto& lit : r.body) body.push_back(mapped(lit, i));
        out.rules.push_back(make_rule(std::move(head), std::move(body)));
    }
    return out;
}

Program unfold_all(const Program& p, const std::vector<Rule>& s) {
    std::set<std::string> headPreds;
    for (const auto& r : s) headPreds.insert(r.head.pred);
    Program q = p;
    for (size_t pass = 0; pass <= s.size(); ++pass) {
        bool remaining = false;
        for (const auto& c : q.rules)
            for (const auto& lit : c.body)
                if (headPreds.count(lit.pred)) remaining = true;
        if (!remaining) return q;
        if (pass == s.size())
            throw std::invalid_argument(
                "invented rules must not be recursive or reference each other");
        for (const auto& r : s) q = unfold(q, r);
    }
    return q;
}

// ---------------------------------------------------------------------------
// Linear invented rules

std::vector<std::pair<std::string, int>> LinearAuxRule::slot_order() const {
    std::vector<std::pair<std::string, int>> slots;
    for (const auto& [pred, count] : counts)
        for (int i = 0; i < count; ++i) slots.emplace_back(pred, i);
    return slots;
}

int LinearAuxRule::body_size() const {
    int total = 0;
    for (const auto& [pred, count] : counts) total += count;
    return total;
}

int LinearAuxRule::head_arity(const std::map<std::string, int>& arities) const {
    int arity = 0;
    for (const auto& [pred, count] : counts) arity += count * arities.at(pred);
    return arity;
}

Rule LinearAuxRule::to_rule(const std::map<std::string, int>& arities) const {
    Rule r;
    r.head.pred = name;
    int next = 0;
    std::vector<Literal> body;
    for (const auto& [pred, copy] : slot_order()) {
        Literal lit;
        lit.pred = pred;
        for (int i = 0; i < arities.at(pred); ++i) lit.args.push_back(next++);
        body.push_back(std::move(lit));
    }
    for (int v = 0; v < next; ++v) r.head.args.push_back(v);
    r.body = std::move(body);
    r.var_count = next;
    return r;
}

LinearAuxRule linearize(const Rule& r) {
    LinearAuxRule lin;
    lin.name = r.head.pred;
    for (const auto& lit : r.body) ++lin.counts[lit.pred];
    return lin;
}

}  // namespace maxref
