#pragma once

#include <array>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dp4/error.hpp"
#include "dp4/field.hpp"
#include "dp4/polynomial.hpp"
#include "dp4/quadric.hpp"

namespace dp4 {

// Declarative input for a pencil of quadrics. Line-oriented sections:
//
//   [field]         mode = cyclotomic|gaussian, params = a, b, c, extend = a
//   [quadric.Q]     diag: a, b, 1, 0, c     or five row: lines (Gram matrix)
//   [quadric.Q2]    same syntax
//   [points]        point <locus index>: [e0, e1, e2, e3, e4]   and line: <form>
//   [certificates]  one rewrite directive per line
//
// Entries are infix expressions over the declared parameters, the imaginary
// unit i, integer literals, and (where an extension is declared) sqrt(<param>);
// ambient variables x0..x4 are allowed only in forms and certificate functions.
// Point coordinates and certificate expressions are validated at parse time
// over the widest declared layer and kept as text, so analysis can re-evaluate
// them over the layer it runs on.

namespace detail {

// A rational expression value: a fraction of polynomials in x0..x4 over F.
// Constant expressions are the degree-0 case.
struct Frac {
    XPoly num, den;
};

class ExprParser {
public:
    ExprParser(FieldPtr F, std::string src, int line, bool allowVars)
        : F_(std::move(F)), src_(std::move(src)), line_(line), allowVars_(allowVars) {}

    Frac parseAll() {
        Frac v = parseExpr();
        skipSpace();
        if (pos_ != src_.size()) failHere(Errc::ParseError, "unexpected trailing input");
        return v;
    }

private:
    [[noreturn]] void failHere(Errc code, const std::string& msg) {
        fail(code, "line " + std::to_string(line_) + ": " + msg);
    }

    void skipSpace() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skipSpace();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skipSpace();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    std::string readIdent() {
        skipSpace();
        size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        return src_.substr(start, pos_ - start);
    }

    std::string readDigits() {
        skipSpace();
        size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (start == pos_) failHere(Errc::ParseError, "expected an integer");
        return src_.substr(start, pos_ - start);
    }

    Frac fromElement(const FieldElement& x) {
        return Frac{XPoly::constant(x, 5), XPoly::constant(FieldElement::one(F_), 5)};
    }

    Frac one() { return fromElement(FieldElement::one(F_)); }

    Frac mul(const Frac& a, const Frac& b) { return Frac{a.num * b.num, a.den * b.den}; }

    Frac div(const Frac& a, const Frac& b) {
        if (b.num.isZero()) failHere(Errc::ValidationError, "division by zero");
        return Frac{a.num * b.den, a.den * b.num};
    }

    Frac add(const Frac& a, const Frac& b) {
        return Frac{a.num * b.den + b.num * a.den, a.den * b.den};
    }

    Frac sub(const Frac& a, const Frac& b) {
        return Frac{a.num * b.den - b.num * a.den, a.den * b.den};
    }

    Frac parseExpr() {
        Frac v = parseTerm();
        while (true) {
            if (eat('+'))
                v = add(v, parseTerm());
            else if (eat('-'))
                v = sub(v, parseTerm());
            else
                return v;
        }
    }

    Frac parseTerm() {
        Frac v = parseUnary();
        while (true) {
            if (eat('*'))
                v = mul(v, parseUnary());
            else if (eat('/'))
                v = div(v, parseUnary());
            else
                return v;
        }
    }

    Frac parseUnary() {
        bool neg = false;
        while (true) {
            if (eat('+')) continue;
            if (eat('-')) {
                neg = !neg;
                continue;
            }
            break;
        }
        Frac v = parsePower();
        if (neg) v.num = -v.num;
        return v;
    }

    Frac parsePower() {
        Frac base = parseAtom();
        if (!eat('^')) return base;
        std::string digits = readDigits();
        if (digits.size() > 2) failHere(Errc::ValidationError, "exponent too large");
        int e = std::stoi(digits);
        if (e > 16) failHere(Errc::ValidationError, "exponent too large");
        Frac v = one();
        for (int k = 0; k < e; ++k) v = mul(v, base);
        return v;
    }

    Frac parseAtom() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            Frac v = parseExpr();
            if (!eat(')')) failHere(Errc::ParseError, "expected ')'");
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c)))
            return fromElement(
                FieldElement::fromConstant(F_, Constant(mpq_class(mpz_class(readDigits())))));
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string id = readIdent();
            if (id == "i") return fromElement(FieldElement::fromConstant(F_, Constant::i()));
            if (id == "sqrt") {
                if (!eat('(')) failHere(Errc::ParseError, "expected '(' after sqrt");
                std::string arg = readIdent();
                if (!eat(')')) failHere(Errc::ParseError, "expected ')'");
                if (!F_->hasExt() || F_->ext->label != arg)
                    failHere(Errc::ValidationError,
                             "sqrt(" + arg + ") is not available over this layer");
                return fromElement(FieldElement::extGenerator(F_));
            }
            if (id.size() == 2 && id[0] == 'x' && id[1] >= '0' && id[1] <= '4') {
                if (!allowVars_)
                    failHere(Errc::ValidationError, "ambient variables are not allowed here");
                return Frac{xvar(F_, id[1] - '0'), XPoly::constant(FieldElement::one(F_), 5)};
            }
            if (F_->paramIndex(id) >= 0) return fromElement(FieldElement::param(F_, id));
            failHere(Errc::ValidationError, "unknown identifier '" + id + "'");
        }
        if (c == '\0') failHere(Errc::ParseError, "unexpected end of expression");
        failHere(Errc::ParseError, std::string("unexpected character '") + c + "'");
    }

    FieldPtr F_;
    std::string src_;
    int line_;
    bool allowVars_;
    size_t pos_ = 0;
};

inline Frac evalExpr(const FieldPtr& F, const std::string& src, int line, bool allowVars) {
    return ExprParser(F, src, line, allowVars).parseAll();
}

// A constant expression: no ambient variables, so both sides are degree 0.
inline FieldElement evalConstant(const FieldPtr& F, const std::string& src, int line) {
    Frac v = evalExpr(F, src, line, false);
    if (v.num.isZero()) return FieldElement::zero(F);
    const FieldElement z = FieldElement::zero(F);
    return v.num.constantTerm(z) * v.den.constantTerm(z).inverse();
}

// A homogeneous linear form in x0..x4 with a constant denominator.
inline LinearForm evalLinearForm(const FieldPtr& F, const std::string& src, int line) {
    Frac v = evalExpr(F, src, line, true);
    require(v.den.isConstant(), Errc::ValidationError,
            "line " + std::to_string(line) + ": a linear form cannot have a variable denominator");
    require(!v.num.isZero(), Errc::ValidationError,
            "line " + std::to_string(line) + ": zero linear form");
    FieldElement dinv = v.den.constantTerm(FieldElement::zero(F)).inverse();
    std::vector<FieldElement> c(5, FieldElement::zero(F));
    for (const auto& t : v.num.terms()) {
        int var = -1;
        unsigned total = 0;
        for (int k = 0; k < 5; ++k) {
            total += t.first[k];
            if (t.first[k] == 1) var = k;
        }
        require(total == 1, Errc::ValidationError,
                "line " + std::to_string(line) + ": form is not homogeneous linear");
        c[var] = c[var] + t.second * dinv;
    }
    return LinearForm(F, std::move(c));
}

inline std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::vector<std::string> splitList(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '(' || c == '[') ++depth;
        if (c == ')' || c == ']') --depth;
        if (c == sep && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline bool validIdent(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
        return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

}  // namespace detail

struct PointDecl {
    int index = -1;
    std::array<std::string, 5> coords;
    int line = 0;
};

struct CertDecl {
    std::string rule;
    std::vector<std::string> args;
    int line = 0;
};

struct PencilSpec {
    std::string source;
    FieldPtr base;                          // the declared base field
    FieldPtr extended;                      // null unless an extension is declared
    std::optional<std::string> extendParam;
    std::optional<XPoly> qForm, q2Form;     // quadratic forms over base
    std::vector<PointDecl> points;
    std::optional<std::pair<std::string, int>> lineDecl;  // reference hyperplane + line no.
    std::vector<CertDecl> certs;

    // Widest declared layer; expressions are validated over it at parse time.
    const FieldPtr& maxLayer() const { return extended ? extended : base; }

    const PointDecl* pointFor(int locusIndex) const {
        for (const auto& p : points)
            if (p.index == locusIndex) return &p;
        return nullptr;
    }
};

namespace detail {

// Accumulates one [quadric.*] section: either a diag line or five row lines.
struct MatrixAccum {
    std::optional<std::vector<FieldElement>> diag;
    std::vector<std::vector<FieldElement>> rows;
    int firstLine = 0;
    bool seen = false;

    XPoly toForm(const FieldPtr& F, const std::string& label) const {
        require(seen, Errc::ParseError, "missing section [" + label + "]");
        std::vector<std::vector<FieldElement>> m(5, std::vector<FieldElement>(5, FieldElement::zero(F)));
        if (diag) {
            for (int k = 0; k < 5; ++k) m[k][k] = (*diag)[k];
        } else {
            require(rows.size() == 5, Errc::ValidationError,
                    "line " + std::to_string(firstLine) + ": [" + label +
                        "] needs a diag line or exactly five row lines");
            m = rows;
        }
        for (int r = 0; r < 5; ++r)
            for (int c = r + 1; c < 5; ++c)
                require(m[r][c] == m[c][r], Errc::ValidationError,
                        "line " + std::to_string(firstLine) + ": [" + label +
                            "] matrix is not symmetric");
        // Gram convention: Q(x) = sum_{i,j} m[i][j] x_i x_j.
        XPoly q(5);
        for (int r = 0; r < 5; ++r)
            for (int c = r; c < 5; ++c) {
                FieldElement coeff = (r == c) ? m[r][r] : m[r][c] + m[r][c];
                if (coeff.isZero()) continue;
                Expo e(5, 0);
                e[r] += 1;
                e[c] += 1;
                q = q + XPoly::monomialTerm(e, coeff, 5);
            }
        require(!q.isZero(), Errc::ValidationError,
                "line " + std::to_string(firstLine) + ": [" + label + "] form is zero");
        return q;
    }
};

inline const std::vector<std::string>& certRules() {
    static const std::vector<std::string> rules = {"merge",   "killsquare",  "substitute",
                                                   "normext", "constsquare", "swap"};
    return rules;
}

inline size_t certArity(const std::string& rule) {
    if (rule == "merge") return 0;
    if (rule == "killsquare") return 1;
    if (rule == "substitute" || rule == "constsquare" || rule == "swap") return 2;
    return 3;  // normext: s ; t ; result  (or auto ; result)
}

}  // namespace detail

inline PencilSpec parsePencilText(const std::string& text, const std::string& source) {
    PencilSpec spec;
    spec.source = source;

    enum class Section { none, field, quadricQ, quadricQ2, points, certificates };
    Section cur = Section::none;
    bool fieldSeen = false;

    ConstantMode mode = ConstantMode::cyclotomic;
    std::vector<std::string> params;
    std::optional<std::string> extend;
    detail::MatrixAccum mq, mq2;
    std::vector<int> pointLines;

    std::istringstream in(text);
    std::string raw;
    int lineNo = 0;
    auto where = [&]() { return "line " + std::to_string(lineNo) + ": "; };

    while (std::getline(in, raw)) {
        ++lineNo;
        if (auto h = raw.find('#'); h != std::string::npos) raw = raw.substr(0, h);
        std::string line = detail::trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            require(line.back() == ']', Errc::ParseError, where() + "unterminated section header");
            std::string name = line.substr(1, line.size() - 2);
            if (name == "field")
                cur = Section::field;
            else if (name == "quadric.Q")
                cur = Section::quadricQ;
            else if (name == "quadric.Q2")
                cur = Section::quadricQ2;
            else if (name == "points")
                cur = Section::points;
            else if (name == "certificates")
                cur = Section::certificates;
            else
                fail(Errc::ParseError, where() + "unknown section [" + name + "]");
            if (cur == Section::field) {
                require(!fieldSeen, Errc::ParseError, where() + "duplicate [field] section");
                fieldSeen = true;
            } else {
                require(fieldSeen, Errc::ParseError,
                        where() + "the [field] section must come first");
                if (!spec.base) {
                    // close the field section on first use
                    require(!params.empty(), Errc::ValidationError,
                            where() + "the [field] section declares no params");
                    spec.base = makeField(mode, params);
                    if (extend) {
                        spec.extended = extendFieldByParam(spec.base, *extend);
                        spec.extendParam = extend;
                    }
                }
            }
            continue;
        }

        switch (cur) {
            case Section::none:
                fail(Errc::ParseError, where() + "content before the first section header");

            case Section::field: {
                auto eq = line.find('=');
                require(eq != std::string::npos, Errc::ParseError,
                        where() + "expected key = value");
                std::string key = detail::trim(line.substr(0, eq));
                std::string val = detail::trim(line.substr(eq + 1));
                if (key == "mode") {
                    if (val == "cyclotomic")
                        mode = ConstantMode::cyclotomic;
                    else if (val == "gaussian")
                        mode = ConstantMode::gaussian;
                    else
                        fail(Errc::ValidationError, where() + "unknown mode '" + val + "'");
                } else if (key == "params") {
                    for (const auto& p : detail::splitList(val, ',')) {
                        require(detail::validIdent(p), Errc::ValidationError,
                                where() + "invalid parameter name '" + p + "'");
                        static const std::vector<std::string> reserved = {
                            "i", "sqrt", "x0", "x1", "x2", "x3", "x4", "lambda", "mu"};
                        for (const auto& r : reserved)
                            require(p != r, Errc::ValidationError,
                                    where() + "parameter name '" + p + "' is reserved");
                        for (const auto& q : params)
                            require(p != q, Errc::ValidationError,
                                    where() + "duplicate parameter '" + p + "'");
                        params.push_back(p);
                    }
                } else if (key == "extend") {
                    bool known = false;
                    for (const auto& q : params) known |= (q == val);
                    require(known, Errc::ValidationError,
                            where() + "extend must name a declared parameter");
                    extend = val;
                } else {
                    fail(Errc::ParseError, where() + "unknown field key '" + key + "'");
                }
                break;
            }

            case Section::quadricQ:
            case Section::quadricQ2: {
                detail::MatrixAccum& m = (cur == Section::quadricQ) ? mq : mq2;
                if (!m.seen) {
                    m.seen = true;
                    m.firstLine = lineNo;
                }
                auto colon = line.find(':');
                require(colon != std::string::npos, Errc::ParseError,
                        where() + "expected diag: or row:");
                std::string key = detail::trim(line.substr(0, colon));
                std::string val = detail::trim(line.substr(colon + 1));
                auto entries = detail::splitList(val, ',');
                require(entries.size() == 5, Errc::ValidationError,
                        where() + "expected 5 entries");
                std::vector<FieldElement> row;
                for (const auto& e : entries)
                    row.push_back(detail::evalConstant(spec.base, e, lineNo));
                if (key == "diag") {
                    require(!m.diag && m.rows.empty(), Errc::ParseError,
                            where() + "diag conflicts with earlier matrix lines");
                    m.diag = std::move(row);
                } else if (key == "row") {
                    require(!m.diag, Errc::ParseError,
                            where() + "row conflicts with an earlier diag line");
                    require(m.rows.size() < 5, Errc::ValidationError,
                            where() + "more than five rows");
                    m.rows.push_back(std::move(row));
                } else {
                    fail(Errc::ParseError, where() + "unknown quadric key '" + key + "'");
                }
                break;
            }

            case Section::points: {
                auto colon = line.find(':');
                require(colon != std::string::npos, Errc::ParseError,
                        where() + "expected point <index>: or line:");
                std::string head = detail::trim(line.substr(0, colon));
                std::string val = detail::trim(line.substr(colon + 1));
                if (head == "line") {
                    require(!spec.lineDecl, Errc::ParseError,
                            where() + "duplicate line declaration");
                    detail::evalLinearForm(spec.maxLayer(), val, lineNo);
                    spec.lineDecl = {val, lineNo};
                    break;
                }
                require(head.rfind("point", 0) == 0, Errc::ParseError,
                        where() + "expected point <index>: or line:");
                std::string idxs = detail::trim(head.substr(5));
                require(!idxs.empty() &&
                            idxs.find_first_not_of("0123456789") == std::string::npos,
                        Errc::ParseError, where() + "expected a point index");
                PointDecl p;
                p.index = std::stoi(idxs);
                p.line = lineNo;
                require(p.index < 64, Errc::ValidationError, where() + "point index out of range");
                for (const auto& q : spec.points)
                    require(q.index != p.index, Errc::ValidationError,
                            where() + "duplicate point index " + idxs);
                require(val.size() >= 2 && val.front() == '[' && val.back() == ']',
                        Errc::ParseError, where() + "expected [c0, c1, c2, c3, c4]");
                auto coords = detail::splitList(val.substr(1, val.size() - 2), ',');
                require(coords.size() == 5, Errc::ValidationError,
                        where() + "a point needs 5 coordinates");
                bool nonzero = false;
                for (int k = 0; k < 5; ++k) {
                    nonzero |= !detail::evalConstant(spec.maxLayer(), coords[k], lineNo).isZero();
                    p.coords[k] = coords[k];
                }
                require(nonzero, Errc::ValidationError, where() + "point has no nonzero coordinate");
                spec.points.push_back(std::move(p));
                pointLines.push_back(lineNo);
                break;
            }

            case Section::certificates: {
                std::istringstream ls(line);
                std::string rule;
                ls >> rule;
                bool known = false;
                for (const auto& r : detail::certRules()) known |= (r == rule);
                require(known, Errc::ParseError, where() + "unknown rewrite rule '" + rule + "'");
                std::string rest;
                std::getline(ls, rest);
                rest = detail::trim(rest);
                CertDecl d;
                d.rule = rule;
                d.line = lineNo;
                if (!rest.empty()) d.args = detail::splitList(rest, ';');
                size_t want = detail::certArity(rule);
                require(d.args.size() == want, Errc::ValidationError,
                        where() + rule + " takes " + std::to_string(want) + " argument(s)");

                // parse-time validation over the widest layer
                const FieldPtr& F = spec.maxLayer();
                if (rule == "killsquare") {
                    detail::evalExpr(F, d.args[0], lineNo, true);
                } else if (rule == "substitute") {
                    require(d.args[0] == "Q" || d.args[0] == "Q2", Errc::ValidationError,
                            where() + "substitute takes Q or Q2");
                    detail::evalExpr(F, d.args[1], lineNo, true);
                } else if (rule == "normext") {
                    if (d.args[0] != "auto") detail::evalExpr(F, d.args[0], lineNo, true);
                    if (d.args[0] != "auto" || d.args[1] != "auto")
                        detail::evalExpr(F, d.args[1], lineNo, true);
                    detail::evalExpr(F, d.args[2], lineNo, true);
                } else if (rule == "constsquare" || rule == "swap") {
                    detail::evalConstant(F, d.args[0], lineNo);
                    detail::evalExpr(F, d.args[1], lineNo, true);
                }
                spec.certs.push_back(std::move(d));
                break;
            }
        }
    }

    require(fieldSeen, Errc::ParseError, "missing [field] section");
    if (!spec.base) {
        require(!params.empty(), Errc::ValidationError, "the [field] section declares no params");
        spec.base = makeField(mode, params);
        if (extend) {
            spec.extended = extendFieldByParam(spec.base, *extend);
            spec.extendParam = extend;
        }
    }
    spec.qForm = mq.toForm(spec.base, "quadric.Q");
    spec.q2Form = mq2.toForm(spec.base, "quadric.Q2");
    return spec;
}

inline PencilSpec parsePencil(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), Errc::ParseError, "cannot open input file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parsePencilText(buf.str(), path);
}

}  // namespace dp4
