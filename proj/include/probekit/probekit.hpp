#pragma once

#include "probekit/anonymize.hpp"
#include "probekit/artifacts.hpp"
#include "probekit/bytes.hpp"
#include "probekit/capture.hpp"
#include "probekit/device_id.hpp"
#include "probekit/digest.hpp"
#include "probekit/errors.hpp"
#include "probekit/fingerprint.hpp"
#include "probekit/frame.hpp"
#include "probekit/mac.hpp"
#include "probekit/pcap.hpp"
#include "probekit/probe.hpp"
#include "probekit/records.hpp"
#include "probekit/report.hpp"
#include "probekit/scan_instance.hpp"
#include "probekit/synth.hpp"
#include "probekit/temporal.hpp"
#include "probekit/union_find.hpp"
#include "probekit/wps.hpp"
