// SPDX-License-Identifier: Apache-2.0
//
// canyon-qd: sub-THz street-canyon channel processing and synthesis
// Copyright (C) 2026 The canyon-qd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "canyon/mpc.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace canyon
{
    void write_mpc_csv(std::ostream &out, const std::vector<Mpc> &mpcs)
    {
        out << "band,tau_s,aod_deg,aoa_deg,power_db,cluster_id\n";
        out << std::setprecision(17);
        for (const auto &m : mpcs)
        {
            out << to_string(m.band) << ',' << m.delay_s << ',' << m.aod_deg << ',' << m.aoa_deg << ','
                << m.power_db << ',';
            if (m.cluster_id)
                out << *m.cluster_id;
            out << '\n';
        }
    }

    std::vector<Mpc> read_mpc_csv(std::istream &in)
    {
        std::vector<Mpc> out;
        std::string line;
        if (!std::getline(in, line))
            return out;
        if (line.rfind("band,tau_s,aod_deg,aoa_deg,power_db,cluster_id", 0) != 0)
            throw std::invalid_argument("read_mpc_csv: unexpected header '" + line + "'");
        std::size_t lineno = 1;
        while (std::getline(in, line))
        {
            ++lineno;
            if (line.empty())
                continue;
            std::vector<std::string> cols;
            std::stringstream ss(line);
            std::string c;
            while (std::getline(ss, c, ','))
                cols.push_back(c);
            if (cols.size() == 5)
                cols.emplace_back();
            if (cols.size() < 6)
                throw std::invalid_argument("read_mpc_csv: line " + std::to_string(lineno) + " has too few columns");
            Mpc m;
            try
            {
                m.band = band_tag_from_string(cols[0]);
                m.delay_s = std::stod(cols[1]);
                m.aod_deg = std::stod(cols[2]);
                m.aoa_deg = std::stod(cols[3]);
                m.power_db = std::stod(cols[4]);
                if (!cols[5].empty())
                    m.cluster_id = std::stoi(cols[5]);
            }
            catch (const std::logic_error &)
            {
                throw std::invalid_argument("read_mpc_csv: malformed number on line " + std::to_string(lineno));
            }
            out.push_back(m);
        }
        return out;
    }
} // namespace canyon
