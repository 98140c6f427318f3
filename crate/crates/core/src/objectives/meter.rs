/// Oracle, communication and simulated-time accounting.
///
/// Time is `computation steps · 1 + communication rounds · τ`: a computation
/// step costs one unit no matter how many agents evaluate gradients in
/// parallel during it.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleMeter {
    lfo_per_agent: Vec<u64>,
    comm_rounds: u64,
    comp_steps: u64,
    tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeterSnapshot {
    pub lfo_total: u64,
    pub comm_rounds: u64,
    pub comp_steps: u64,
    pub time_units: f64,
}

impl OracleMeter {
    pub fn new(agents: usize, tau: f64) -> Self {
        Self { lfo_per_agent: vec![0; agents], comm_rounds: 0, comp_steps: 0, tau }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn lfo_per_agent(&self) -> &[u64] {
        &self.lfo_per_agent
    }

    pub fn lfo_total(&self) -> u64 {
        self.lfo_per_agent.iter().sum()
    }

    pub fn comm_rounds(&self) -> u64 {
        self.comm_rounds
    }

    pub fn time_units(&self) -> f64 {
        self.comp_steps as f64 + self.comm_rounds as f64 * self.tau
    }

    pub(crate) fn record_lfo(&mut self, agent: usize) {
        self.lfo_per_agent[agent] += 1;
    }

    pub fn record_computation_step(&mut self) {
        self.comp_steps += 1;
    }

    pub fn record_comm_round(&mut self) {
        self.record_comm_rounds(1);
    }

    pub fn record_comm_rounds(&mut self, rounds: u64) {
        self.comm_rounds += rounds;
    }

    pub fn snapshot(&self) -> MeterSnapshot {
        MeterSnapshot {
            lfo_total: self.lfo_total(),
            comm_rounds: self.comm_rounds,
            comp_steps: self.comp_steps,
            time_units: self.time_units(),
        }
    }
}
