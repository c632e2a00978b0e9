#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hetnet/io.hpp"

namespace hetnet::io {

namespace {

struct FigureSpec {
    const char* id;
    const char* variable;   // required sweep variable
    const char* policy;     // required policy rows
    const char* quantity;   // csv column for y
    const char* tiers;      // python list literal
    const char* xlabel;
    const char* ylabel;
    const char* title;
    bool mark_max;
};

constexpr FigureSpec kFigures[] = {
    {"fig2", "nbar_as", "p1", "coverage", "['total']",
     "mean simultaneously active SBSs per cluster",
     "total coverage probability",
     "Coverage vs active SBSs (Policy 1)", false},
    {"fig3", "nbar_as", "p2", "coverage", "['total']",
     "mean simultaneously active SBSs per cluster",
     "total coverage probability",
     "Coverage vs active SBSs (Policy 2)", false},
    {"fig4", "nbar_as", "p1", "throughput", "['total']",
     "mean simultaneously active SBSs per cluster",
     "throughput (bits/s/Hz/km^2)",
     "Throughput vs active SBSs (Policy 1)", false},
    {"fig5", "nbar_as", "p2", "throughput", "['total']",
     "mean simultaneously active SBSs per cluster",
     "throughput (bits/s/Hz/km^2)",
     "Throughput vs active SBSs (Policy 2)", false},
    {"fig6", "sigma_s", "p1", "coverage", "['macro', 'small', 'total']",
     "SBS scattering deviation sigma_s (km)", "coverage probability",
     "Coverage vs sigma_s (Policy 1)", false},
    {"fig7", "sigma_s", "p1", "assoc_prob", "['macro', 'small']",
     "SBS scattering deviation sigma_s (km)", "association probability",
     "Association probability vs sigma_s (Policy 1)", false},
    {"fig8", "d", "p2", "coverage", "['total']",
     "distance threshold D (km)", "total coverage probability",
     "Coverage vs distance threshold (Policy 2)", true},
    {"fig9", "d", "p2", "coverage", "['total']",
     "distance threshold D (km)", "total coverage probability",
     "Coverage vs distance threshold per sigma_s (Policy 2)", true},
};

const FigureSpec* find_figure(const std::string& id) {
    for (const FigureSpec& f : kFigures)
        if (id == f.id) return &f;
    return nullptr;
}

} // namespace

std::filesystem::path emit_plot_script(const std::filesystem::path& manifest_path,
                                       const std::string& figure_id,
                                       const std::filesystem::path& out_dir) {
    const FigureSpec* fig = find_figure(figure_id);
    if (!fig)
        throw ConfigError("unknown figure id '" + figure_id +
                          "' (expected fig2..fig9)");

    std::ifstream in(manifest_path);
    if (!in) throw ConfigError("cannot open manifest " + manifest_path.string());
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const std::exception& e) {
        throw ConfigError("manifest parse error: " + std::string(e.what()));
    }

    const auto points = manifest.value("points", nlohmann::json::array());
    if (points.empty())
        throw ConfigError("manifest holds no sweep points; nothing to plot");
    const std::string var = manifest.value("sweep_variable", "");
    if (var != fig->variable)
        throw ConfigError(std::string(fig->id) + " needs a sweep over '" +
                          fig->variable + "' with policy '" + fig->policy +
                          "' rows and columns value/" + fig->quantity +
                          "; manifest sweeps '" + var + "'");
    bool has_policy = false;
    for (const auto& pt : points)
        if (pt.value("policy", "") == fig->policy &&
            pt.value("status", "") == "ok")
            has_policy = true;
    if (!has_policy)
        throw ConfigError(std::string(fig->id) + " needs '" + fig->policy +
                          "' rows (columns: value, engine, policy, tier, " +
                          fig->quantity + "); none found in the manifest");

    const std::string csv = manifest.value("csv", "sweep.csv");

    std::ostringstream py;
    py << "#!/usr/bin/env python3\n"
       << "# generated by hetnet plot; reads " << csv
       << " next to this script\n"
       << "import csv\n"
       << "import os\n"
       << "\n"
       << "import matplotlib\n"
       << "matplotlib.use('Agg')\n"
       << "import matplotlib.pyplot as plt\n"
       << "\n"
       << "POLICY = '" << fig->policy << "'\n"
       << "QUANTITY = '" << fig->quantity << "'\n"
       << "TIERS = " << fig->tiers << "\n"
       << "MARK_MAX = " << (fig->mark_max ? "True" : "False") << "\n"
       << "CSV = os.path.join(os.path.dirname(os.path.abspath(__file__)), '"
       << csv << "')\n"
       << "\n"
       << "rows = []\n"
       << "with open(CSV, newline='') as fh:\n"
       << "    for row in csv.DictReader(fh):\n"
       << "        if row['policy'] == POLICY and row['status'] == 'ok':\n"
       << "            rows.append(row)\n"
       << "\n"
       << "fig, ax = plt.subplots(figsize=(6.4, 4.4))\n"
       << "for tier in TIERS:\n"
       << "    for engine, style in (('analytic', '-'), ('sim', 'o')):\n"
       << "        pts = [(float(r['value']), float(r[QUANTITY]),\n"
       << "                float(r['ci_half_width']))\n"
       << "               for r in rows\n"
       << "               if r['tier'] == tier and r['engine'] == engine]\n"
       << "        if not pts:\n"
       << "            continue\n"
       << "        pts.sort()\n"
       << "        xs = [p[0] for p in pts]\n"
       << "        ys = [p[1] for p in pts]\n"
       << "        label = f'{tier} ({engine})'\n"
       << "        if engine == 'analytic':\n"
       << "            ax.plot(xs, ys, style, label=label)\n"
       << "        else:\n"
       << "            ax.errorbar(xs, ys, yerr=[p[2] for p in pts],\n"
       << "                        fmt=style, mfc='none', capsize=2,\n"
       << "                        label=label)\n"
       << "        if MARK_MAX and engine == 'analytic':\n"
       << "            k = max(range(len(ys)), key=ys.__getitem__)\n"
       << "            if 0 < k < len(ys) - 1:\n"
       << "                ax.plot([xs[k]], [ys[k]], 'k*', markersize=12,\n"
       << "                        label=f'interior max (D={xs[k]:.3g})')\n"
       << "\n"
       << "ax.set_xlabel('" << fig->xlabel << "')\n"
       << "ax.set_ylabel('" << fig->ylabel << "')\n"
       << "ax.set_title('" << fig->title << "')\n"
       << "ax.grid(True, alpha=0.3)\n"
       << "ax.legend()\n"
       << "out = os.path.splitext(os.path.abspath(__file__))[0] + '.png'\n"
       << "fig.savefig(out, dpi=150, bbox_inches='tight')\n"
       << "print(f'wrote {out}')\n";

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path script = out_dir / (figure_id + ".py");
    std::ofstream out(script, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + script.string());
    out << py.str();
    return script;
}

} // namespace hetnet::io
