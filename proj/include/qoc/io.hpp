#ifndef QOC_IO_HPP
#define QOC_IO_HPP

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "qoc/common.hpp"
#include "qoc/field.hpp"
#include "qoc/optimizer.hpp"
#include "qoc/propagator.hpp"

namespace qoc {

/// Tab-separated numeric writer. Every file starts with comment lines
/// recording the config hash and the column names; floats carry 17
/// significant digits so files round-trip losslessly.
class TsvWriter {
public:
    TsvWriter(const std::string& path, const std::string& config_hash,
              const std::vector<std::string>& columns)
        : out_(path) {
        if (!out_) throw Error("io: cannot open " + path + " for writing");
        out_ << "# config " << config_hash << "\n#";
        for (const auto& c : columns) out_ << '\t' << c;
        out_ << '\n';
    }

    void row(std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            if (!first) out_ << '\t';
            first = false;
            out_ << fmt(v);
        }
        out_ << '\n';
    }

    void row(const std::vector<double>& values) {
        for (size_t i = 0; i < values.size(); ++i)
            out_ << (i ? "\t" : "") << fmt(values[i]);
        out_ << '\n';
    }

    static std::string fmt(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    }

private:
    std::ofstream out_;
};

inline void write_field_tsv(const std::string& path, const std::string& hash,
                            const ControlField& f) {
    std::vector<std::string> cols = {"t"};
    for (int j = 0; j < f.n_channels(); ++j)
        cols.push_back("eps_" + std::to_string(j));
    TsvWriter w(path, hash, cols);
    for (int i = 0; i < f.n_samples(); ++i) {
        std::vector<double> r = {f.time_grid().t(i)};
        for (int j = 0; j < f.n_channels(); ++j) r.push_back(f(i, j));
        w.row(r);
    }
}

inline void write_spectrum_tsv(const std::string& path, const std::string& hash,
                               const FieldSpectrum& sp) {
    TsvWriter w(path, hash, {"omega", "re", "im", "power"});
    // Emit in ascending frequency order (negative bins first).
    const int n = static_cast<int>(sp.omega.size());
    std::vector<int> order(n);
    // First row is the most negative bin, n/2 + 1 for either parity.
    for (int m = 0; m < n; ++m) order[m] = (m + n / 2 + 1) % n;
    for (int m : order)
        w.row({sp.omega[m], sp.values[m].real(), sp.values[m].imag(),
               std::norm(sp.values[m])});
}

inline void write_convergence_tsv(const std::string& path, const std::string& hash,
                                  const ConvergenceRecord& rec) {
    TsvWriter w(path, hash,
                {"iteration", "J1", "J2", "J3", "J", "fluence", "alpha"});
    for (const auto& s : rec.iterations)
        w.row({static_cast<double>(s.iteration), s.J1, s.J2, s.J3, s.J,
               s.fluence, s.alpha});
}

/// Occupations |<n|Psi(t)>|^2 of a stored trajectory in a given basis.
template <class System>
void write_occupations_tsv(const std::string& path, const std::string& hash,
                           const System& sys, const Trajectory& traj,
                           const std::vector<CVector>& basis,
                           const TimeGrid& tg, int stride = 1) {
    std::vector<std::string> cols = {"t"};
    for (size_t nn = 0; nn < basis.size(); ++nn)
        cols.push_back("p" + std::to_string(nn));
    TsvWriter w(path, hash, cols);
    for (int i = 0; i <= tg.n_steps; i += stride) {
        std::vector<double> r = {tg.t(i)};
        const CVector psi = traj.at(i);
        for (const auto& b : basis) r.push_back(std::norm(sys.inner(b, psi)));
        w.row(r);
    }
}

namespace detail {

/// Strict token-to-double conversion accepting "nan"/"inf" spellings that
/// stream extraction rejects.
inline double parse_entry(const std::string& tok, const std::string& context) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size())
        throw Error("io: bad numeric entry '" + tok + "' in " + context);
    return v;
}

}  // namespace detail

/// Plain text matrix reader for N-level configs: one row per line,
/// whitespace-separated real entries; '#' comments allowed.
inline RMatrix read_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io: cannot open matrix file " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        const auto cut = line.find('#');
        if (cut != std::string::npos) line.erase(cut);
        std::istringstream ls(line);
        std::vector<double> r;
        std::string tok;
        while (ls >> tok) r.push_back(detail::parse_entry(tok, path));
        if (!r.empty()) rows.push_back(std::move(r));
    }
    if (rows.empty()) throw Error("io: empty matrix file " + path);
    const size_t ncols = rows.front().size();
    for (const auto& r : rows)
        if (r.size() != ncols)
            throw Error("io: ragged matrix file " + path);
    RMatrix m(rows.size(), ncols);
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < ncols; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rows[i][j];
    return m;
}

/// Parse a semicolon-row matrix literal: "0 0.5; 0.5 0".
inline RMatrix parse_matrix(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::string rowtext;
    std::istringstream in(text);
    while (std::getline(in, rowtext, ';')) {
        std::istringstream rs(rowtext);
        std::vector<double> r;
        std::string tok;
        while (rs >> tok) r.push_back(detail::parse_entry(tok, "matrix literal"));
        if (!r.empty()) rows.push_back(std::move(r));
    }
    if (rows.empty()) throw Error("io: empty matrix literal");
    const size_t ncols = rows.front().size();
    for (const auto& r : rows)
        if (r.size() != ncols) throw Error("io: ragged matrix literal");
    RMatrix m(rows.size(), ncols);
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < ncols; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rows[i][j];
    return m;
}

}  // namespace qoc

#endif
