use core::fmt;

/// The 24 modulation identities of the benchmark.
///
/// The discriminant is the on-disk label id. OQPSK is the class missing from
/// the published 23-name list; it is carried here because the underlying
/// public dataset has it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum ModClass {
    Ook = 0,
    Ask4,
    Ask8,
    Bpsk,
    Qpsk,
    Oqpsk,
    Psk8,
    Psk16,
    Psk32,
    Apsk16,
    Apsk32,
    Apsk64,
    Apsk128,
    Qam16,
    Qam32,
    Qam64,
    Qam128,
    Qam256,
    Gmsk,
    AmSsbWc,
    AmSsbSc,
    AmDsbWc,
    AmDsbSc,
    Fm,
}

impl ModClass {
    pub const COUNT: usize = 24;

    pub const ALL: [ModClass; 24] = [
        ModClass::Ook,
        ModClass::Ask4,
        ModClass::Ask8,
        ModClass::Bpsk,
        ModClass::Qpsk,
        ModClass::Oqpsk,
        ModClass::Psk8,
        ModClass::Psk16,
        ModClass::Psk32,
        ModClass::Apsk16,
        ModClass::Apsk32,
        ModClass::Apsk64,
        ModClass::Apsk128,
        ModClass::Qam16,
        ModClass::Qam32,
        ModClass::Qam64,
        ModClass::Qam128,
        ModClass::Qam256,
        ModClass::Gmsk,
        ModClass::AmSsbWc,
        ModClass::AmSsbSc,
        ModClass::AmDsbWc,
        ModClass::AmDsbSc,
        ModClass::Fm,
    ];

    pub fn id(self) -> u16 {
        self as u16
    }

    pub fn from_id(id: u16) -> Option<ModClass> {
        Self::ALL.get(id as usize).copied()
    }

    /// Canonical name used in reports and config files.
    pub fn name(self) -> &'static str {
        match self {
            ModClass::Ook => "OOK",
            ModClass::Ask4 => "ASK4",
            ModClass::Ask8 => "ASK8",
            ModClass::Bpsk => "BPSK",
            ModClass::Qpsk => "QPSK",
            ModClass::Oqpsk => "OQPSK",
            ModClass::Psk8 => "PSK8",
            ModClass::Psk16 => "PSK16",
            ModClass::Psk32 => "PSK32",
            ModClass::Apsk16 => "APSK16",
            ModClass::Apsk32 => "APSK32",
            ModClass::Apsk64 => "APSK64",
            ModClass::Apsk128 => "APSK128",
            ModClass::Qam16 => "QAM16",
            ModClass::Qam32 => "QAM32",
            ModClass::Qam64 => "QAM64",
            ModClass::Qam128 => "QAM128",
            ModClass::Qam256 => "QAM256",
            ModClass::Gmsk => "GMSK",
            ModClass::AmSsbWc => "AM-SSB-WC",
            ModClass::AmSsbSc => "AM-SSB-SC",
            ModClass::AmDsbWc => "AM-DSB-WC",
            ModClass::AmDsbSc => "AM-DSB-SC",
            ModClass::Fm => "FM",
        }
    }

    /// Spelling used by the RadioML 2018.01A release (`4ASK`, `16QAM`, ...).
    pub fn dataset_name(self) -> &'static str {
        match self {
            ModClass::Ask4 => "4ASK",
            ModClass::Ask8 => "8ASK",
            ModClass::Psk8 => "8PSK",
            ModClass::Psk16 => "16PSK",
            ModClass::Psk32 => "32PSK",
            ModClass::Apsk16 => "16APSK",
            ModClass::Apsk32 => "32APSK",
            ModClass::Apsk64 => "64APSK",
            ModClass::Apsk128 => "128APSK",
            ModClass::Qam16 => "16QAM",
            ModClass::Qam32 => "32QAM",
            ModClass::Qam64 => "64QAM",
            ModClass::Qam128 => "128QAM",
            ModClass::Qam256 => "256QAM",
            other => other.name(),
        }
    }

    /// Accepts either the canonical or the dataset spelling, case-insensitively.
    pub fn from_name(name: &str) -> Option<ModClass> {
        Self::ALL.iter().copied().find(|m| {
            m.name().eq_ignore_ascii_case(name) || m.dataset_name().eq_ignore_ascii_case(name)
        })
    }

    pub fn is_analog(self) -> bool {
        matches!(
            self,
            ModClass::AmSsbWc | ModClass::AmSsbSc | ModClass::AmDsbWc | ModClass::AmDsbSc | ModClass::Fm
        )
    }
}

impl fmt::Display for ModClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
