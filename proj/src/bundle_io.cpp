// Self-describing text encoding of an EnvironmentBundle.
//
//   mlirl-bundle 1
//   name <label>
//   costs_only <0|1>
//   dims <states> <actions> <features>
//   discount <g>
//   initial <p_0> ... <p_{n-1}>
//   transitions <nnz>
//   <state> <action> <next> <prob>        (nnz lines, row order)
//   features
//   <phi(x,a,0)> ... <phi(x,a,k-1)>       (states*actions lines, row x*A + a)
//   weights <mode> <theta_0> ... <theta_{k-1}>
//   end
//
// Reals use 17 significant digits so the encoding round-trips exactly.

#include "mlirl/csv.hpp"
#include "mlirl/environments.hpp"
#include "mlirl/errors.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace mlirl {

namespace {

std::string next_token(std::istream& in, const char* context) {
    std::string token;
    if (!(in >> token)) throw IoError(std::string("bundle: unexpected end of input reading ") + context);
    return token;
}

void expect(std::istream& in, const std::string& keyword) {
    const std::string token = next_token(in, keyword.c_str());
    if (token != keyword) throw IoError("bundle: expected '" + keyword + "', found '" + token + "'");
}

Index read_index(std::istream& in, const char* context) {
    return static_cast<Index>(parse_integer(next_token(in, context)));
}

double read_real(std::istream& in, const char* context) {
    return parse_double(next_token(in, context));
}

} // namespace

void write_bundle(std::ostream& out, const EnvironmentBundle& bundle) {
    const auto& mdp = bundle.mdp;
    const auto& phi = bundle.features.values();
    out << "mlirl-bundle 1\n";
    out << "name " << bundle.name << "\n";
    out << "costs_only " << (bundle.costs_only ? 1 : 0) << "\n";
    out << "dims " << mdp.n_states() << ' ' << mdp.n_actions() << ' ' << phi.cols() << "\n";
    out << "discount " << format_double(mdp.discount()) << "\n";
    out << "initial";
    for (Index x = 0; x < mdp.n_states(); ++x) out << ' ' << format_double(mdp.initial_dist()(x));
    out << "\n";
    const auto list = mdp.transition_list();
    out << "transitions " << list.size() << "\n";
    for (const auto& t : list) {
        out << t.state << ' ' << t.action << ' ' << t.next << ' ' << format_double(t.prob) << "\n";
    }
    out << "features\n";
    for (Index r = 0; r < phi.rows(); ++r) {
        for (Index k = 0; k < phi.cols(); ++k) {
            if (k) out << ' ';
            out << format_double(phi(r, k));
        }
        out << "\n";
    }
    out << "weights " << to_string(bundle.true_weights.mode());
    for (Index k = 0; k < bundle.true_weights.size(); ++k) {
        out << ' ' << format_double(bundle.true_weights.theta()(k));
    }
    out << "\nend\n";
    if (!out) throw IoError("bundle: write failed");
}

EnvironmentBundle read_bundle(std::istream& in) {
    expect(in, "mlirl-bundle");
    if (read_index(in, "version") != 1) throw IoError("bundle: unsupported version");
    expect(in, "name");
    std::string name = next_token(in, "name");
    expect(in, "costs_only");
    const bool costs_only = read_index(in, "costs_only") != 0;
    expect(in, "dims");
    const Index n = read_index(in, "states");
    const Index na = read_index(in, "actions");
    const Index nk = read_index(in, "features");
    if (n <= 0 || na <= 0 || nk <= 0) throw IoError("bundle: non-positive dimension");
    expect(in, "discount");
    const double discount = read_real(in, "discount");
    expect(in, "initial");
    Vector initial(n);
    for (Index x = 0; x < n; ++x) initial(x) = read_real(in, "initial");
    expect(in, "transitions");
    const Index nnz = read_index(in, "transition count");
    std::vector<Transition> list;
    list.reserve(static_cast<std::size_t>(nnz));
    for (Index i = 0; i < nnz; ++i) {
        Transition t{};
        t.state = read_index(in, "transition");
        t.action = read_index(in, "transition");
        t.next = read_index(in, "transition");
        t.prob = read_real(in, "transition");
        list.push_back(t);
    }
    expect(in, "features");
    Matrix phi(n * na, nk);
    for (Index r = 0; r < phi.rows(); ++r) {
        for (Index k = 0; k < nk; ++k) phi(r, k) = read_real(in, "features");
    }
    expect(in, "weights");
    const ConstraintMode mode = parse_constraint_mode(next_token(in, "weight mode"));
    Vector theta(nk);
    for (Index k = 0; k < nk; ++k) theta(k) = read_real(in, "weights");
    expect(in, "end");

    try {
        return EnvironmentBundle{TabularMdp(n, na, list, discount, std::move(initial)),
                                 FeatureMap(n, na, std::move(phi)),
                                 WeightVector(std::move(theta), mode), std::move(name), costs_only};
    } catch (const IoError&) {
        throw;
    } catch (const Error& e) {
        throw IoError(std::string("bundle: invalid content: ") + e.what());
    }
}

} // namespace mlirl
