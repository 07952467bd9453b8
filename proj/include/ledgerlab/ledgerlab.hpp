#pragma once

// Convenience include for the whole library.

#include "ledgerlab/audit.hpp"
#include "ledgerlab/bytes.hpp"
#include "ledgerlab/crypto.hpp"
#include "ledgerlab/errors.hpp"
#include "ledgerlab/group.hpp"
#include "ledgerlab/guide.hpp"
#include "ledgerlab/identity.hpp"
#include "ledgerlab/ledger.hpp"
#include "ledgerlab/merkle.hpp"
#include "ledgerlab/netsim.hpp"
#include "ledgerlab/scenario.hpp"
#include "ledgerlab/sha256.hpp"
#include "ledgerlab/topology.hpp"
