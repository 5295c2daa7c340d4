#include "gibbstf/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace gibbstf {

namespace fs = std::filesystem;

std::string sidecar_path(const std::string& csv_path) {
    fs::path p(csv_path);
    p.replace_extension(".window.json");
    return p.string();
}

Json window_to_json(const Window& w) {
    Json lo = Json::array(), hi = Json::array();
    for (int a = 0; a < w.dim(); ++a) {
        lo.push_back(w.lower()[a]);
        hi.push_back(w.upper()[a]);
    }
    return {{"lower", lo}, {"upper", hi}};
}

Window window_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("lower") || !j.contains("upper")) {
        throw ConfigError("window descriptor needs 'lower' and 'upper'");
    }
    const auto& lo = j.at("lower");
    const auto& hi = j.at("upper");
    if (!lo.is_array() || !hi.is_array() || lo.size() != hi.size() || lo.empty() || lo.size() > 3) {
        throw ConfigError("window 'lower' and 'upper' must be arrays of equal length 1..3");
    }
    Position a{0, 0, 0}, b{0, 0, 0};
    for (std::size_t i = 0; i < lo.size(); ++i) {
        a[i] = lo[i].get<double>();
        b[i] = hi[i].get<double>();
    }
    return Window(static_cast<int>(lo.size()), a, b);
}

Configuration read_pattern(const std::string& csv_path, const std::string& window_path) {
    const Window carrier = window_from_json(read_json(window_path.empty() ? sidecar_path(csv_path) : window_path));
    std::ifstream in(csv_path);
    if (!in) throw ConfigError("cannot open pattern file " + csv_path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("pattern file " + csv_path + " is empty");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
            header.push_back(cell);
        }
    }
    int col_x = -1, col_y = -1, col_z = -1, col_mark = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "x") col_x = static_cast<int>(i);
        else if (header[i] == "y") col_y = static_cast<int>(i);
        else if (header[i] == "z") col_z = static_cast<int>(i);
        else if (header[i] == "mark") col_mark = static_cast<int>(i);
    }
    if (col_x < 0) throw ConfigError("pattern header must start with x,y[,mark]");
    std::vector<MarkedPoint> points;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        auto num = [&](int c) {
            if (c < 0) return 0.0;
            if (static_cast<std::size_t>(c) >= cells.size()) {
                throw ConfigError(csv_path + ": row " + std::to_string(row) + " has too few columns");
            }
            try {
                return std::stod(cells[static_cast<std::size_t>(c)]);
            } catch (const std::exception&) {
                throw ConfigError(csv_path + ": row " + std::to_string(row) + " is not numeric");
            }
        };
        MarkedPoint p;
        p.position = {num(col_x), carrier.dim() > 1 ? num(col_y) : 0.0, carrier.dim() > 2 ? num(col_z) : 0.0};
        if (col_mark >= 0 && static_cast<std::size_t>(col_mark) < cells.size() && !cells[static_cast<std::size_t>(col_mark)].empty()) {
            p.mark = num(col_mark);
        }
        points.push_back(p);
    }
    return Configuration(carrier, std::move(points));
}

void write_pattern(const Configuration& cfg, const std::string& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write " + csv_path);
    out.precision(17);
    bool marked = false;
    for (const auto& p : cfg.points()) marked = marked || p.mark.has_value();
    const int d = cfg.dim();
    out << "x";
    if (d > 1) out << ",y";
    if (d > 2) out << ",z";
    if (marked) out << ",mark";
    out << "\n";
    for (const auto& p : cfg.points()) {
        out << p.position[0];
        if (d > 1) out << "," << p.position[1];
        if (d > 2) out << "," << p.position[2];
        if (marked) {
            out << ",";
            if (p.mark) out << *p.mark;
        }
        out << "\n";
    }
    write_json(window_to_json(cfg.carrier()), sidecar_path(csv_path));
}

Json to_json(const Vector& v) {
    Json j = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
    return j;
}

Json to_json(const Matrix& m) {
    Json j = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        j.push_back(row);
    }
    return j;
}

Json to_json(const ContrastReport& r) {
    Json j{{"method", r.method},
           {"theta_hat", to_json(r.theta_hat)},
           {"residuals", to_json(r.residuals)},
           {"U_value", r.U_value},
           {"converged", r.converged},
           {"iterations", r.iterations},
           {"quadrature", {{"kind", to_string(r.quadrature_kind)}, {"n_dummy", r.n_dummy}}},
           {"window", window_to_json(r.window)},
           {"warnings", r.warnings}};
    if (r.theta_hat.size() == 2) {
        j["beta_hat"] = std::exp(-r.theta_hat[0]);
        j["gamma_hat"] = std::exp(-r.theta_hat[1]);
    }
    if (!r.N_k.empty()) j["N_k"] = r.N_k;
    if (!r.V_k.empty()) j["V_k"] = r.V_k;
    if (!r.hessian_max_eigenvalue.empty()) j["hessian_max_eigenvalue"] = r.hessian_max_eigenvalue;
    return j;
}

Json to_json(const CovarianceReport& r) {
    return {{"theta", to_json(r.theta)},       {"E_hat", to_json(r.E_hat)},
            {"Sigma_hat", to_json(r.Sigma_hat)}, {"sandwich", to_json(r.sandwich)},
            {"avar", to_json(r.avar)},           {"S", to_json(r.S)},
            {"D_block", r.D_block},              {"blocks", r.blocks},
            {"interior_blocks", r.interior_blocks}, {"condition_EEt", r.condition}};
}

Json to_json(const GnzReport& r) {
    Json entries = Json::array();
    for (const auto& e : r.entries) entries.push_back({{"h", e.label}, {"mean", e.mean}, {"se", e.se}, {"z", e.z}});
    return {{"check", "gnz"}, {"replicates", r.replicates}, {"passed", r.passed}, {"entries", entries}};
}

Json to_json(const ProfileReport& r) {
    Json cells = Json::array();
    for (std::size_t c = 0; c < r.grid.size(); ++c) {
        cells.push_back({{"theta", to_json(r.grid[c])}, {"U", r.U[c]}, {"se", r.se[c]}});
    }
    return {{"check", "profile"},
            {"argmin", to_json(r.grid[r.argmin])},
            {"unique", r.unique},
            {"near_minimum", r.near_minimum},
            {"cells", cells}};
}

Json to_json(const DetCheckReport& r) {
    return {{"check", "det"},
            {"samples", r.samples},
            {"tuples", r.tuples},
            {"positive", r.positive},
            {"negative", r.negative},
            {"null", r.null},
            {"verdict", to_string(r.verdict)},
            {"bins", r.bins.size()},
            {"det_E_psi_v", r.det_E_psi_v},
            {"coefficients_found", r.coefficients_found},
            {"coefficients", to_json(r.coefficients)},
            {"notes", r.notes}};
}

void write_json(const Json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

}  // namespace gibbstf
