//! Generators shaped like the 16 loghub 2k samples: the same header layouts
//! and a handful of templates per system with skewed frequencies.

use chrono::{Duration, NaiveDate, NaiveDateTime};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::template::{expand, Burst, Pools};

/// `(weight, level, component, message template)`.
pub type Event = (u32, &'static str, &'static str, &'static str);

pub struct Ctx<'a> {
    pub t: NaiveDateTime,
    pub level: &'a str,
    pub component: &'a str,
    pub rng: &'a mut ChaCha8Rng,
    pub pools: &'a Pools,
    pub line: usize,
}

pub struct Dataset {
    pub name: &'static str,
    /// Loghub-style header format.
    pub format: &'static str,
    pub start: (i32, u32, u32),
    /// Mean gap between lines, in milliseconds.
    pub gap_ms: i64,
    pub header: fn(&mut Ctx<'_>) -> String,
    pub events: &'static [Event],
}

fn ms(t: &NaiveDateTime) -> u32 {
    t.and_utc().timestamp_subsec_millis()
}

pub const DATASETS: &[Dataset] = &[
    Dataset {
        name: "HDFS",
        format: "<Date> <Time> <Pid> <Level> <Component>: <Content>",
        start: (2008, 11, 9),
        gap_ms: 900,
        header: |c| format!("{} {} {} {} {}: ", c.t.format("%y%m%d"), c.t.format("%H%M%S"), c.rng.gen_range(13..40000), c.level, c.component),
        events: &[
            (30, "INFO", "dfs.DataNode$PacketResponder", "PacketResponder {int:0-2} for block {blk} terminating"),
            (28, "INFO", "dfs.DataNode$PacketResponder", "Received block {blk} of size {int:1000-67108864} from /{ip}"),
            (20, "INFO", "dfs.DataNode$DataXceiver", "Receiving block {blk} src: /{ip}:{int:30000-60000} dest: /{ip}:50010"),
            (14, "INFO", "dfs.FSNamesystem", "BLOCK* NameSystem.addStoredBlock: blockMap updated: {ip}:50010 is added to {blk} size {int:1000-67108864}"),
            (10, "INFO", "dfs.FSNamesystem", "BLOCK* NameSystem.allocateBlock: /user/root/rand/_temporary/_task_200811092030_0001_m_{pad:0-2000:6}_0/part-{pad:0-2000:5}. {blk}"),
            (6, "INFO", "dfs.DataNode$DataXceiver", "{ip}:50010 Served block {blk} to /{ip}"),
            (4, "WARN", "dfs.DataNode$DataXceiver", "{ip}:50010:Got exception while serving {blk} to /{ip}:"),
            (3, "INFO", "dfs.FSDataset", "Deleting block {blk} file /mnt/hadoop/dfs/data/current/subdir{int:0-63}/{blk}"),
            (2, "INFO", "dfs.DataBlockScanner", "Verification succeeded for {blk}"),
        ],
    },
    Dataset {
        name: "Hadoop",
        format: "<Date> <Time> <Level> \\[<Process>\\] <Component>: <Content>",
        start: (2015, 10, 18),
        gap_ms: 400,
        header: |c| {
            let proc_ = if c.rng.gen_bool(0.7) { "main".to_string() } else { "RMCommunicator Allocator".to_string() };
            format!("{},{:03} {} [{}] {}: ", c.t.format("%Y-%m-%d %H:%M:%S"), ms(&c.t), c.level, proc_, c.component)
        },
        events: &[
            (25, "INFO", "org.apache.hadoop.mapreduce.v2.app.rm.RMContainerAllocator", "Before Scheduling: PendingReds:{int:0-1} ScheduledMaps:{int:0-10} ScheduledReds:0 AssignedMaps:{int:0-10} AssignedReds:0 CompletedMaps:{int:0-10} CompletedReds:0 ContAlloc:{int:0-12} ContRel:0 HostLocal:{int:0-8} RackLocal:{int:0-3}"),
            (20, "INFO", "org.apache.hadoop.mapreduce.v2.app.rm.RMContainerAllocator", "Recalculating schedule, headroom=<memory:{int:0-10240}, vCores:{int:-5-5}>"),
            (15, "INFO", "org.apache.hadoop.mapreduce.v2.app.rm.RMContainerAllocator", "Reduce slow start threshold not met. completedMapsForReduceSlowstart {int:1-10}"),
            (10, "INFO", "org.apache.hadoop.mapreduce.v2.app.job.impl.TaskAttemptImpl", "attempt_1445144423722_0020_m_{pad:0-12:6}_0 TaskAttempt Transitioned from {pick:NEW|UNASSIGNED|ASSIGNED|RUNNING} to {pick:UNASSIGNED|ASSIGNED|RUNNING|SUCCEEDED}"),
            (8, "INFO", "org.apache.hadoop.mapreduce.v2.app.job.impl.TaskImpl", "task_1445144423722_0020_m_{pad:0-12:6} Task Transitioned from {pick:NEW|SCHEDULED|RUNNING} to {pick:SCHEDULED|RUNNING|SUCCEEDED}"),
            (8, "WARN", "org.apache.hadoop.hdfs.LeaseRenewer", "Failed to renew lease for [DFSClient_NONMAPREDUCE_{int:100000000-2000000000}_1] for {int:1-900} seconds.  Will retry shortly ..."),
            (6, "INFO", "org.apache.hadoop.ipc.Client", "Retrying connect to server: {host}/{ip}:{int:8000-9999}. Already tried {int:0-9} time(s); maxRetries=45"),
            (4, "INFO", "org.apache.hadoop.mapreduce.v2.app.MRAppMaster", "Created MRAppMaster for application appattempt_1445144423722_0020_000001"),
            (4, "ERROR", "org.apache.hadoop.mapreduce.v2.app.rm.RMContainerAllocator", "ERROR IN CONTACTING RM."),
        ],
    },
    Dataset {
        name: "Spark",
        format: "<Date> <Time> <Level> <Component>: <Content>",
        start: (2017, 6, 9),
        gap_ms: 300,
        header: |c| format!("{} {} {}: ", c.t.format("%y/%m/%d %H:%M:%S"), c.level, c.component),
        events: &[
            (25, "INFO", "storage.BlockManager", "Found block rdd_{int:0-40}_{int:0-40} locally"),
            (20, "INFO", "executor.Executor", "Finished task {int:0-40}.0 in stage {int:0-40}.0 (TID {seq}). {int:900-3000} bytes result sent to driver"),
            (18, "INFO", "executor.CoarseGrainedExecutorBackend", "Got assigned task {seq}"),
            (12, "INFO", "executor.Executor", "Running task {int:0-40}.0 in stage {int:0-40}.0 (TID {seq})"),
            (8, "INFO", "spark.CacheManager", "Partition rdd_{int:0-40}_{int:0-40} not found, computing it"),
            (6, "INFO", "storage.MemoryStore", "Block broadcast_{int:0-40} stored as values in memory (estimated size {f:1-40} KB, free {f:1-9} GB)"),
            (6, "INFO", "broadcast.TorrentBroadcast", "Reading broadcast variable {int:0-40} took {int:1-60} ms"),
            (5, "INFO", "storage.MemoryStore", "Block broadcast_{int:0-40}_piece0 stored as bytes in memory (estimated size {f:1-40} KB, free {f:1-9} GB)"),
        ],
    },
    Dataset {
        name: "Zookeeper",
        format: "<Date> <Time> - <Level>  \\[<Node>:<Component>@<Id>\\] - <Content>",
        start: (2015, 7, 29),
        gap_ms: 2500,
        header: |c| {
            let (node, id) = match c.component {
                "FastLeaderElection" => ("QuorumPeer[myid=1]/0:0:0:0:0:0:0:0:2181", 774),
                "NIOServerCnxnFactory" => ("NIOServerCxn.Factory:0.0.0.0/0.0.0.0:2181", 197),
                "NIOServerCnxn" => ("NIOServerCxn.Factory:0.0.0.0/0.0.0.0:2181", 1001),
                "QuorumCnxManager" => ("WorkerReceiver[myid=1]", 762),
                _ => ("SyncThread:1", 325),
            };
            format!("{},{:03} - {:<5} [{}:{}@{}] - ", c.t.format("%Y-%m-%d %H:%M:%S"), ms(&c.t), c.level, node, c.component, id)
        },
        events: &[
            (30, "INFO", "NIOServerCnxnFactory", "Accepted socket connection from /{ip}:{int:30000-60000}"),
            (25, "INFO", "NIOServerCnxn", "Closed socket connection for client /{ip}:{int:30000-60000} which had sessionid 0x{hex:15}"),
            (15, "WARN", "NIOServerCnxn", "caught end of stream exception"),
            (12, "INFO", "FastLeaderElection", "Notification time out: {pick:3200|6400|12800|25600|51200|60000}"),
            (10, "WARN", "QuorumCnxManager", "Cannot open channel to {int:1-3} at election address /{ip}:3888"),
            (5, "INFO", "ZooKeeperServer", "Established session 0x{hex:15} with negotiated timeout {pick:10000|20000|40000} for client /{ip}:{int:30000-60000}"),
            (3, "ERROR", "NIOServerCnxn", "Unexpected Exception: "),
        ],
    },
    Dataset {
        name: "BGL",
        format: "<Label> <Timestamp> <Date> <Node> <Time> <NodeRepeat> <Type> <Component> <Level> <Content>",
        start: (2005, 6, 3),
        gap_ms: 5000,
        header: |c| {
            let node = format!("R{:02}-M{}-N{}-C:J{:02}-U{:02}", c.rng.gen_range(0..8), c.rng.gen_range(0..2), c.rng.gen_range(0..16), c.rng.gen_range(2..18), c.rng.gen_range(1..12));
            let label = if c.level == "FATAL" { "KERNDTLB" } else { "-" };
            format!(
                "{} {} {} {} {}.{:06} {} RAS {} {} ",
                label,
                c.t.and_utc().timestamp(),
                c.t.format("%Y.%m.%d"),
                node,
                c.t.format("%Y-%m-%d-%H.%M.%S"),
                c.t.and_utc().timestamp_subsec_micros(),
                node,
                c.component,
                c.level
            )
        },
        events: &[
            (35, "INFO", "KERNEL", "instruction cache parity error corrected"),
            (20, "INFO", "KERNEL", "generating core.{int:1-9000}"),
            (12, "INFO", "KERNEL", "{int:1-64} ddr error(s) detected and corrected on rank 0, symbol {int:0-30}, bit {int:0-7}"),
            (10, "FATAL", "KERNEL", "data TLB error interrupt"),
            (8, "INFO", "KERNEL", "CE sym {int:0-30}, at 0x{hex:8}, mask 0x{hex:2}"),
            (6, "ERROR", "APP", "ciod: Error reading message prefix after LOGIN_MESSAGE on CioStream socket to 172.16.96.116:{int:30000-40000}: Link has been severed"),
            (5, "FATAL", "KERNEL", "machine check interrupt (bit=0x{hex:2}): L2 dcache unit data parity error"),
            (4, "INFO", "DISCOVERY", "Node card VPD check: U{pad:1-11:2} node in processor card slot J{pad:2-17:2} do not match. VPD ecid {hex:24}, found {hex:24}"),
        ],
    },
    Dataset {
        name: "HPC",
        format: "<LogId> <Node> <Component> <State> <Time> <Flag> <Content>",
        start: (2004, 2, 26),
        gap_ms: 20000,
        header: |c| {
            let id = 400_000 + c.line * 3 + c.rng.gen_range(0..3);
            format!("{} node-{} {} {} {} {} ", id, c.rng.gen_range(0..256), c.component, c.level, c.t.and_utc().timestamp(), 1)
        },
        events: &[
            (30, "state_change.unavailable", "unix.hw", "Component State Change: Component \\042alt0\\042 is in the unavailable state (HWID={int:1000-5000})"),
            (20, "boot.pkg.status", "boot_cmd", "Targeting domains:node-D{int:0-7} and nodes:node-[{int:0-63}-{int:64-127}] child of command {int:2000-3000}"),
            (15, "ambient.temperature", "node.env", "Temperature ({int:30-90}C) exceeds warning threshold"),
            (12, "link.status", "switch_module", "Link error on broadcast tree Interconnect-{int:0-3}T{pad:0-15:2}:{pad:0-31:2}:{int:0-3}"),
            (10, "running", "node.status", "running"),
            (8, "boot.status", "node.status", "configured out"),
            (5, "psu.failure", "unix.hw", "PSU failure ambient={int:20-40} threshold exceeded"),
        ],
    },
    Dataset {
        name: "Thunderbird",
        format: "<Label> <Timestamp> <Date> <User> <Month> <Day> <Time> <Location> <Component>: <Content>",
        start: (2005, 11, 9),
        gap_ms: 700,
        header: |c| {
            let host = format!("{}{}", ["dn", "bn", "an", "cn"][c.rng.gen_range(0..4)], c.rng.gen_range(1..800));
            let comp = if c.component.ends_with(']') { c.component.replace("[]", &format!("[{}]", c.rng.gen_range(1000..32000))) } else { c.component.to_string() };
            format!(
                "{} {} {} {} {} {} {} {}/{} {}: ",
                c.level,
                c.t.and_utc().timestamp(),
                c.t.format("%Y.%m.%d"),
                host,
                c.t.format("%b"),
                c.t.format("%-d"),
                c.t.format("%H:%M:%S"),
                host,
                host,
                comp
            )
        },
        events: &[
            (30, "-", "crond(pam_unix)[]", "session {pick:opened|closed} for user root"),
            (20, "-", "crond[]", "(root) CMD (run-parts /etc/cron.hourly)"),
            (15, "-", "kernel", "e1000: eth{int:0-1}: e1000_watchdog: NIC Link is Up {pick:100|1000} Mbps Full Duplex"),
            (10, "-", "sshd[]", "Accepted publickey for {user} from {ip} port {int:30000-60000} ssh2"),
            (8, "-", "ntpd[]", "synchronized to {ip}, stratum {int:1-4}"),
            (6, "VAPI", "kernel", "[KERNEL_IB][ib_mad_dispatch][/mnt_projects/sysapps/src/ib/topspin/topspin-src-3.2.0-16/ib/ts_api_ng/mad/obj_host_amd64_custom1_rhel4/ts_ib_mad/mad_filter.c:{int:100-200}]FILTER: Dropping packet"),
            (5, "-", "postfix/postdrop[]", "warning: unable to look up public/pickup: No such file or directory"),
        ],
    },
    Dataset {
        name: "Windows",
        format: "<Date> <Time>, <Level>                  <Component>    <Content>",
        start: (2016, 9, 28),
        gap_ms: 150,
        header: |c| format!("{}, {}                  {}    ", c.t.format("%Y-%m-%d %H:%M:%S"), c.level, c.component),
        events: &[
            (35, "Info", "CBS", "SQM: Queued {int:0-5} file(s) for upload with pattern: C:\\Windows\\servicing\\sqm\\*_std.sqm, flags: 0x6"),
            (25, "Info", "CBS", "Read out cached package applicability for package: Package_for_KB{int:2500000-3200000}~31bf3856ad364e35~amd64~~6.1.{int:1-4}.{int:0-9}, ApplicableState: {int:0-112}, CurrentState:{int:0-112}"),
            (15, "Info", "CSI", "{pad:0-4096:8}@2016/9/28:{pad:0-23:2}:{pad:0-59:2}:{pad:0-59:2}.{int:100-999} WcpInitialize (wcp.dll version 0.0.0.6) called (stack @0x7fed806eb5d @0x7fefa1c8728 @0x7fefa1c8856 @0xff83e474 @0xff83d7bd @0xff83db2f)"),
            (10, "Info", "CBS", "Session: 30546{int:100000-999999}_{int:100000000-999999999} initialized by client WindowsUpdateAgent."),
            (8, "Info", "CBS", "Warning: Unrecognized packageExtended attribute."),
            (5, "Info", "CBS", "Failed to internally open package. [HRESULT = 0x800f0805 - CBS_E_INVALID_PACKAGE]"),
        ],
    },
    Dataset {
        name: "Linux",
        format: "<Month> <Date> <Time> <Level> <Component>: <Content>",
        start: (2005, 6, 14),
        gap_ms: 60000,
        header: |c| {
            let comp = if c.component.ends_with(']') { c.component.replace("[]", &format!("[{}]", c.rng.gen_range(1000..32000))) } else { c.component.to_string() };
            format!("{} {:>2} {} {} {}: ", c.t.format("%b"), c.t.format("%-d").to_string(), c.t.format("%H:%M:%S"), c.level, comp)
        },
        events: &[
            (30, "combo", "sshd(pam_unix)[]", "authentication failure; logname= uid=0 euid=0 tty=NODEVssh ruser= rhost={ip}  user={user}"),
            (20, "combo", "sshd(pam_unix)[]", "check pass; user unknown"),
            (15, "combo", "su(pam_unix)[]", "session {pick:opened|closed} for user {user} by (uid=0)"),
            (12, "combo", "ftpd[]", "connection from {ip} () at {pick:Sun|Mon|Tue} Jul {int:1-28} {pad:0-23:2}:{pad:0-59:2}:{pad:0-59:2} 2005"),
            (10, "combo", "logrotate", "ALERT exited abnormally with [1]"),
            (8, "combo", "kernel", "klogd 1.4.1, log source = /proc/kmsg started."),
            (5, "combo", "cups", "cupsd shutdown succeeded"),
        ],
    },
    Dataset {
        name: "Android",
        format: "<Date> <Time>  <Pid>  <Tid> <Level> <Component>: <Content>",
        start: (2017, 3, 17),
        gap_ms: 40,
        header: |c| {
            let pid = 1702;
            let tid = [1702, 2395, 3037, 1820][c.rng.gen_range(0..4)];
            format!("{}.{:03}  {}  {} {} {}: ", c.t.format("%m-%d %H:%M:%S"), ms(&c.t), pid, tid, c.level, c.component)
        },
        events: &[
            (30, "D", "PowerManagerService", "acquire lock={int:10000000-300000000}, flags=0x{hex:1}, tag=\"{pick:RILJ|*alarm*|WindowManager|View Lock}\", name=android, ws=null, uid=1000, pid={int:1000-3000}"),
            (25, "D", "PowerManagerService", "release:lock={int:10000000-300000000}, flg=0x0, tag=\"{pick:RILJ|*alarm*|WindowManager|View Lock}\", name=android\", ws=null, uid=1000, pid={int:1000-3000}"),
            (15, "V", "WindowManager", "Skipping AppWindowToken({hex:7} token=Token({hex:7} ActivityRecord({hex:7} u0 com.tencent.qt.qtl/.activity.info.NewsDetailXmlActivity t{int:100-300}))) -- going to hide"),
            (12, "I", "DisplayPowerController", "Blocking screen on until initial contents have been drawn."),
            (10, "D", "DisplayPowerController", "updateBrightness: brightness={int:0-255}"),
            (8, "W", "ActivityManager", "Unable to start service Intent ( act=com.{word}.push pkg=com.{word} ) U=0: not found"),
        ],
    },
    Dataset {
        name: "HealthApp",
        format: "<Time>|<Component>|<Pid>|<Content>",
        start: (2017, 12, 23),
        gap_ms: 500,
        header: |c| format!("{}:{}|{}|30002312|", c.t.format("%Y%m%d-%H:%M:%S"), ms(&c.t), c.component),
        events: &[
            (30, "", "Step_LSC", "onStandStepChanged {seq}"),
            (20, "", "Step_SPUtils", "setTodayTotalDetailSteps={int:1514000000000-1514100000000}##{int:5000-8000}##548365##8661##12456##27173805"),
            (15, "", "Step_LSC", "onExtend:{int:1514000000000-1514100000000} {int:0-30000} {int:0-4} {int:0-4}"),
            (12, "", "Step_StandReportReceiver", "onReceive action: android.intent.action.SCREEN_{pick:ON|OFF}"),
            (10, "", "Step_ExtSDM", "calculateCaloriesWithCache totalCalories={int:100000-200000}"),
            (8, "", "HiH_HiHealthDataInsertStore", "saveHealthDetailData() deviceID = {int:1-9} size = {int:1-4}"),
            (5, "", "Step_LSC", "flush sensor data"),
        ],
    },
    Dataset {
        name: "Apache",
        format: "\\[<Time>\\] \\[<Level>\\] <Content>",
        start: (2005, 12, 4),
        gap_ms: 3000,
        header: |c| format!("[{}] [{}] ", c.t.format("%a %b %d %H:%M:%S %Y"), c.level),
        events: &[
            (30, "notice", "", "jk2_init() Found child {int:1000-32000} in scoreboard slot {int:6-10}"),
            (25, "notice", "", "workerEnv.init() ok /etc/httpd/conf/workers2.properties"),
            (20, "error", "", "mod_jk child workerEnv in error state {int:6-10}"),
            (10, "error", "", "[client {ip}] Directory index forbidden by rule: /var/www/html/"),
            (6, "error", "", "jk2_init() Can't find child {int:1000-32000} in scoreboard"),
            (4, "notice", "", "SIGHUP received.  Attempting to restart"),
        ],
    },
    Dataset {
        name: "Proxifier",
        format: "\\[<Time>\\] <Program> - <Content>",
        start: (2016, 10, 30),
        gap_ms: 800,
        header: |c| format!("[{}] {} - ", c.t.format("%m.%d %H:%M:%S"), c.component),
        events: &[
            (30, "", "chrome.exe", "proxy.cse.cuhk.edu.hk:5070 open through proxy proxy.cse.cuhk.edu.hk:5070 HTTPS"),
            (25, "", "chrome.exe", "{host}.com:443 close, {int:0-90000} bytes ({f:0-90} KB) sent, {int:0-900000} bytes ({f:0-900} KB) received, lifetime {pad:0-59:2}:{pad:0-59:2}"),
            (15, "", "Dropbox.exe", "{host}.dropbox.com:443 open through proxy proxy.cse.cuhk.edu.hk:5070 HTTPS"),
            (12, "", "WeChat.exe", "{ip}:80 close, {int:0-9000} bytes sent, {int:0-9000} bytes received, lifetime <1 sec"),
            (8, "", "svchost.exe", "{host}.microsoft.com:443 error : Could not connect to proxy proxy.cse.cuhk.edu.hk:5070 - connection attempt failed with error 10061"),
        ],
    },
    Dataset {
        name: "OpenSSH",
        format: "<Date> <Day> <Time> <Component> sshd\\[<Pid>\\]: <Content>",
        start: (2016, 12, 10),
        gap_ms: 2000,
        header: |c| format!("{} {} {} LabSZ sshd[{}]: ", c.t.format("%b"), c.t.format("%d"), c.t.format("%H:%M:%S"), 24000 + c.line / 3),
        events: &[
            (25, "", "", "pam_unix(sshd:auth): authentication failure; logname= uid=0 euid=0 tty=ssh ruser= rhost={sip}  user=root"),
            (22, "", "", "Failed password for {pick:root|invalid user admin|invalid user test} from {sip} port {int:30000-60000} ssh2"),
            (15, "", "", "Received disconnect from {sip}: 11: Bye Bye [preauth]"),
            (12, "", "", "Invalid user {user} from {sip}"),
            (8, "", "", "input_userauth_request: invalid user {user} [preauth]"),
            (8, "", "", "reverse mapping checking getaddrinfo for {host}.com [{sip}] failed - POSSIBLE BREAK-IN ATTEMPT!"),
            (6, "", "", "Connection closed by {sip} [preauth]"),
            (4, "", "", "message repeated {int:2-5} times: [ Failed password for root from {sip} port {int:30000-60000} ssh2]"),
        ],
    },
    Dataset {
        name: "OpenStack",
        format: "<Logrecord> <Date> <Time> <Pid> <Level> <Component> \\[<ADDR>\\] <Content>",
        start: (2017, 5, 16),
        gap_ms: 250,
        header: |c| {
            let req = format!("req-{}-{}-4{}-{}-{}", hexs(c.rng, 8), hexs(c.rng, 4), hexs(c.rng, 3), hexs(c.rng, 4), hexs(c.rng, 12));
            format!(
                "nova-{}.log.1.2017-05-16_13:53:08 {}.{:03} {} {} {} [{} 113d3a99c3da401fbd62cc2caa5b96d2 54fadb412c4e40cdbaed9335e4c35a9e - - -] ",
                if c.component.contains("compute") { "compute" } else { "api" },
                c.t.format("%Y-%m-%d %H:%M:%S"),
                ms(&c.t),
                [25746, 2931, 25743][c.rng.gen_range(0..3)],
                c.level,
                c.component,
                req
            )
        },
        events: &[
            (40, "INFO", "nova.osapi_compute.wsgi.server", "10.11.10.1 \"GET /v2/54fadb412c4e40cdbaed9335e4c35a9e/servers/detail HTTP/1.1\" status: 200 len: {int:1500-2000} time: 0.{pad:100000-999999:7}"),
            (20, "INFO", "nova.compute.manager", "[instance: {hex:8}-{hex:4}-{hex:4}-{hex:4}-{hex:12}] VM {pick:Started|Paused|Resumed|Stopped} (Lifecycle Event)"),
            (15, "INFO", "nova.compute.resource_tracker", "Final resource view: name=cp-1.slowvm1.tcloud-pg0.utah.cloudlab.us phys_ram=64172MB used_ram={int:512-4096}MB phys_disk=15GB used_disk={int:0-40}GB total_vcpus=16 used_vcpus={int:0-8} pci_stats=[]"),
            (12, "INFO", "nova.virt.libvirt.imagecache", "image {hex:8}-{hex:4}-{hex:4}-{hex:4}-{hex:12} at (/var/lib/nova/instances/_base/{hex:40}): checking"),
            (8, "INFO", "nova.metadata.wsgi.server", "10.11.21.{int:100-150},10.11.10.1 \"GET /openstack/2013-10-17/meta_data.json HTTP/1.1\" status: 200 len: {int:900-1000} time: {f:0-3}"),
            (5, "WARNING", "nova.compute.manager", "[instance: {hex:8}-{hex:4}-{hex:4}-{hex:4}-{hex:12}] Instance shutdown by itself. Calling the stop API."),
        ],
    },
    Dataset {
        name: "Mac",
        format: "<Month>  <Date> <Time> <User> <Component>\\[<PID>\\]: <Content>",
        start: (2017, 7, 1),
        gap_ms: 6000,
        header: |c| format!("{}  {} {} calvisitor-10-105-160-95 {}[{}]: ", c.t.format("%b"), c.t.format("%-d"), c.t.format("%H:%M:%S"), c.component, if c.component == "kernel" { 0 } else { c.rng.gen_range(30..900) }),
        events: &[
            (30, "", "kernel", "IOThunderboltSwitch<0>(0x0)::listenerCallback - Thunderbolt HPD packet for route = 0x0 port = {int:10-12} unplug = {int:0-1}"),
            (20, "", "kernel", "ARPT: {int:600000-700000}.{pad:0-999999:6}: wl0: MDNS: IPV4 Addr: {ip}"),
            (15, "", "com.apple.CDScheduler", "Thermal pressure state: {int:0-2} Memory pressure state: 0"),
            (12, "", "QQ", "FA||Url||taskID[{int:2019350000-2019359999}] dealloc"),
            (10, "", "symptomsd", "__73-[NetworkAnalyticsEngine observeValueForKeyPath:ofObject:change:context:]_block_invoke unexpected switch value {int:1-3}"),
            (8, "", "kernel", "AppleCamIn::systemWakeCall - messageType = 0x{hex:8}"),
            (5, "", "sharingd", "{pad:0-23:2}:{pad:0-59:2}:{pad:0-59:2}.{pad:0-999:3} : Scanning mode Contacts Only"),
        ],
    },
];

fn hexs(rng: &mut ChaCha8Rng, n: usize) -> String {
    (0..n).map(|_| char::from_digit(rng.gen_range(0..16), 16).unwrap()).collect()
}

impl Dataset {
    pub fn by_name(name: &str) -> Option<&'static Dataset> {
        DATASETS.iter().find(|d| d.name.eq_ignore_ascii_case(name))
    }

    /// `lines` lines, each terminated by `\n`.
    pub fn generate(&self, lines: usize, seed: u64) -> Vec<u8> {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fxhash(self.name));
        let pools = Pools::new(&mut rng);
        let (y, m, d) = self.start;
        let mut t = NaiveDate::from_ymd_opt(y, m, d).unwrap().and_hms_opt(3, 15, 0).unwrap();
        let total: u32 = self.events.iter().map(|e| e.0).sum();
        let mut seqs = vec![rng.gen_range(0..5000u64); self.events.len()];
        let mut burst = Burst::default();
        let mut out = String::new();
        for line in 0..lines {
            let gap = rng.gen_range(0..=2 * self.gap_ms);
            t += Duration::milliseconds(gap);
            let mut pick = rng.gen_range(0..total);
            let ev = self
                .events
                .iter()
                .position(|e| {
                    if pick < e.0 {
                        true
                    } else {
                        pick -= e.0;
                        false
                    }
                })
                .unwrap();
            let (_, level, component, template) = self.events[ev];
            let mut ctx = Ctx {
                t,
                level,
                component,
                rng: &mut rng,
                pools: &pools,
                line,
            };
            out.push_str(&(self.header)(&mut ctx));
            expand(template, &mut rng, &pools, &mut seqs[ev], &mut burst, &mut out);
            out.push('\n');
        }
        out.into_bytes()
    }
}

fn fxhash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x1000_0000_01b3))
}
